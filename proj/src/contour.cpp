#include "qz/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace qz {

namespace {

// Grid edges are identified by the node at their low end plus an
// orientation bit; shared edges of neighbouring cells therefore stitch by
// integer key, with bitwise-identical vertex coordinates.
std::uint64_t h_edge_key(std::size_t i, std::size_t j, std::size_t nx) {
  return 2 * (static_cast<std::uint64_t>(j) * nx + i);
}
std::uint64_t v_edge_key(std::size_t i, std::size_t j, std::size_t nx) {
  return 2 * (static_cast<std::uint64_t>(j) * nx + i) + 1;
}

struct Segment {
  std::uint64_t a;
  std::uint64_t b;
};

class SegmentBuilder {
public:
  SegmentBuilder(const AttenuationField& field, double level_db)
      : field_(field), level_(level_db) {}

  // dB value of a node, floored so a perfect null interpolates finitely.
  double node_db(std::size_t i, std::size_t j) const {
    const double db = attenuation_db(field_.at(i, j));
    return std::max(db, kReportDbFloor);
  }

  void emit(std::uint64_t edge_a, std::uint64_t edge_b) { segments_.push_back({edge_a, edge_b}); }

  // Crossing point on the edge from node (ia, ja) to node (ib, jb),
  // linearly interpolated in dB space. Cached per edge key.
  void ensure_vertex(std::uint64_t key, std::size_t ia, std::size_t ja, std::size_t ib,
                     std::size_t jb) {
    if (vertices_.count(key)) return;
    const double va = node_db(ia, ja);
    const double vb = node_db(ib, jb);
    const double t = (level_ - va) / (vb - va);
    vertices_[key] = ContourVertex{field_.x(ia) + t * (field_.x(ib) - field_.x(ia)),
                                   field_.y(ja) + t * (field_.y(jb) - field_.y(ja))};
  }

  const std::vector<Segment>& segments() const { return segments_; }
  const std::unordered_map<std::uint64_t, ContourVertex>& vertices() const { return vertices_; }

private:
  const AttenuationField& field_;
  double level_;
  std::vector<Segment> segments_;
  std::unordered_map<std::uint64_t, ContourVertex> vertices_;
};

} // namespace

ContourSet extract_iso_contour(const AttenuationField& field, double level_db) {
  if (field.nx < 2 || field.ny < 2)
    throw std::invalid_argument("extract_iso_contour: field must be at least 2x2");

  SegmentBuilder builder(field, level_db);

  for (std::size_t j = 0; j + 1 < field.ny; ++j) {
    for (std::size_t i = 0; i + 1 < field.nx; ++i) {
      if (field.is_masked(i, j) || field.is_masked(i + 1, j) || field.is_masked(i + 1, j + 1) ||
          field.is_masked(i, j + 1))
        continue;

      const double v0 = builder.node_db(i, j);         // bottom-left
      const double v1 = builder.node_db(i + 1, j);     // bottom-right
      const double v2 = builder.node_db(i + 1, j + 1); // top-right
      const double v3 = builder.node_db(i, j + 1);     // top-left

      const int index = (v0 < level_db ? 1 : 0) | (v1 < level_db ? 2 : 0) |
                        (v2 < level_db ? 4 : 0) | (v3 < level_db ? 8 : 0);
      if (index == 0 || index == 15) continue;

      const std::uint64_t bottom = h_edge_key(i, j, field.nx);
      const std::uint64_t top = h_edge_key(i, j + 1, field.nx);
      const std::uint64_t left = v_edge_key(i, j, field.nx);
      const std::uint64_t right = v_edge_key(i + 1, j, field.nx);

      const auto vertex_bottom = [&] { builder.ensure_vertex(bottom, i, j, i + 1, j); };
      const auto vertex_top = [&] { builder.ensure_vertex(top, i, j + 1, i + 1, j + 1); };
      const auto vertex_left = [&] { builder.ensure_vertex(left, i, j, i, j + 1); };
      const auto vertex_right = [&] { builder.ensure_vertex(right, i + 1, j, i + 1, j + 1); };

      const auto segment = [&](std::uint64_t a, std::uint64_t b) { builder.emit(a, b); };

      switch (index) {
        case 1: case 14: vertex_bottom(); vertex_left(); segment(bottom, left); break;
        case 2: case 13: vertex_bottom(); vertex_right(); segment(bottom, right); break;
        case 4: case 11: vertex_right(); vertex_top(); segment(right, top); break;
        case 8: case 7: vertex_top(); vertex_left(); segment(top, left); break;
        case 3: case 12: vertex_left(); vertex_right(); segment(left, right); break;
        case 6: case 9: vertex_bottom(); vertex_top(); segment(bottom, top); break;
        case 5: case 10: {
          // Saddle: connect across the diagonal whose side the cell-center
          // mean falls on.
          vertex_bottom(); vertex_top(); vertex_left(); vertex_right();
          const bool center_below = 0.25 * (v0 + v1 + v2 + v3) < level_db;
          const bool isolate_corners_1_3 = (index == 5) == center_below;
          if (isolate_corners_1_3) {
            segment(bottom, right);
            segment(top, left);
          } else {
            segment(bottom, left);
            segment(right, top);
          }
          break;
        }
        default: break;
      }
    }
  }

  const auto& segments = builder.segments();
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].a].push_back(s);
    incident[segments[s].b].push_back(s);
  }

  ContourSet contours;
  contours.level_db = level_db;

  std::vector<bool> visited(segments.size(), false);
  const auto next_segment = [&](std::uint64_t key) -> std::optional<std::size_t> {
    for (std::size_t s : incident[key])
      if (!visited[s]) return s;
    return std::nullopt;
  };

  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (visited[s0]) continue;
    visited[s0] = true;

    std::vector<std::uint64_t> keys{segments[s0].a, segments[s0].b};
    bool closed = false;

    // Grow forward from the tail, then (if still open) backward from the head.
    while (auto s = next_segment(keys.back())) {
      visited[*s] = true;
      const std::uint64_t last = keys.back();
      keys.push_back(segments[*s].a == last ? segments[*s].b : segments[*s].a);
      if (keys.back() == keys.front()) {
        keys.pop_back();
        closed = true;
        break;
      }
    }
    if (!closed) {
      while (auto s = next_segment(keys.front())) {
        visited[*s] = true;
        const std::uint64_t first = keys.front();
        keys.insert(keys.begin(), segments[*s].a == first ? segments[*s].b : segments[*s].a);
      }
    }

    Polyline polyline;
    polyline.closed = closed;
    polyline.vertices.reserve(keys.size());
    for (std::uint64_t key : keys) polyline.vertices.push_back(builder.vertices().at(key));
    contours.polylines.push_back(std::move(polyline));
  }
  return contours;
}

namespace {

double shoelace_area(const Polyline& polyline) {
  double twice_area = 0.0;
  const auto& v = polyline.vertices;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const auto& a = v[k];
    const auto& b = v[(k + 1) % v.size()];
    twice_area += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice_area);
}

double max_pairwise_distance(const Polyline& polyline) {
  double best = 0.0;
  const auto& v = polyline.vertices;
  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      const double dx = v[a].x - v[b].x;
      const double dy = v[a].y - v[b].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  }
  return std::sqrt(best);
}

} // namespace

ContourExtent contour_extent(const ContourSet& contours) {
  if (contours.polylines.empty())
    throw std::invalid_argument("contour_extent: empty contour set");

  const Polyline* largest_closed = nullptr;
  double largest_area = -1.0;
  for (const auto& polyline : contours.polylines) {
    if (!polyline.closed) continue;
    const double area = shoelace_area(polyline);
    if (area > largest_area) {
      largest_area = area;
      largest_closed = &polyline;
    }
  }

  ContourExtent extent;
  if (largest_closed != nullptr) {
    extent.max_diameter_m = max_pairwise_distance(*largest_closed);
    extent.area_m2 = largest_area;
    return extent;
  }

  // No closed polyline: the diameter of the longest open one is still
  // defined, the enclosed area is not.
  const Polyline* largest_open = &contours.polylines.front();
  for (const auto& polyline : contours.polylines)
    if (polyline.vertices.size() > largest_open->vertices.size()) largest_open = &polyline;
  extent.max_diameter_m = max_pairwise_distance(*largest_open);
  return extent;
}

} // namespace qz
