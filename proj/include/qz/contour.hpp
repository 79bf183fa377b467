#pragma once

#include <optional>
#include <vector>

#include "qz/zones.hpp"

namespace qz {

struct ContourVertex {
  double x = 0.0;
  double y = 0.0;
};

struct Polyline {
  std::vector<ContourVertex> vertices; // >= 2
  bool closed = false;
};

/// Iso-level polylines of an attenuation field at a dB level.
struct ContourSet {
  double level_db = 0.0;
  std::vector<Polyline> polylines;
};

/// Marching-squares extraction of the level_db iso-contour. Node values are
/// converted to dB (floored at kReportDbFloor so a perfect null stays
/// finite) and crossings are linearly interpolated in dB space. Cells with
/// any masked corner emit nothing. Cell scan is row-major and saddle cells
/// are resolved by the cell-center mean, so output ordering is
/// deterministic. Requires at least a 2x2 field.
ContourSet extract_iso_contour(const AttenuationField& field, double level_db);

struct ContourExtent {
  double max_diameter_m = 0.0;    // max pairwise vertex distance
  std::optional<double> area_m2;  // shoelace area; absent without a closed polyline
};

/// Measures the largest polyline of the set: max pairwise vertex distance
/// plus, when a closed polyline exists, its shoelace area. Diameter falls
/// back to the largest open polyline when nothing is closed; an empty set
/// is an error.
ContourExtent contour_extent(const ContourSet& contours);

} // namespace qz
