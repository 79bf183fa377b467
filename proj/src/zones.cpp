#include "qz/zones.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qz/correlation.hpp"

namespace qz {

namespace {

std::size_t axis_count(double lo, double hi, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
  if (!(hi > lo)) throw std::invalid_argument("grid: max must exceed min");
  return static_cast<std::size_t>(std::llround((hi - lo) / spacing)) + 1;
}

double limit_or_farfield(const PowerSpectrum& spectrum, ControlMode mode, double d_m,
                         double c_mps, double gain_ratio) {
  if (mode == ControlMode::NearField)
    return nearfield_attenuation_limit(spectrum, d_m, c_mps);
  Scenario scenario;
  scenario.cancellation_point = Point{1.0, 0.0, 0.0}; // unused by the far-field curve
  scenario.c_mps = c_mps;
  scenario.mode = ControlMode::FarField;
  scenario.gain_ratio = gain_ratio;
  return farfield_attenuation(spectrum, scenario, d_m);
}

// Splits [0, count) into contiguous chunks and runs fn(begin, end) on worker
// threads. Cells are independent, so the result does not depend on the split.
template <typename Fn>
void parallel_chunks(std::size_t count, Fn&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t n_threads = std::min<std::size_t>(hw, count == 0 ? 1 : count);
  if (n_threads <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  const std::size_t chunk = (count + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

} // namespace

std::size_t GridSpec::nx() const { return axis_count(x_min, x_max, spacing); }
std::size_t GridSpec::ny() const { return axis_count(y_min, y_max, spacing); }

double nearfield_attenuation(const PowerSpectrum& spectrum, const Scenario& scenario,
                             const Point& p1, double exclusion_radius_m) {
  validate(scenario);
  if (scenario.mode != ControlMode::NearField)
    throw std::invalid_argument("nearfield_attenuation: scenario is not near-field");
  const double r1 = p1.norm();
  if (r1 < exclusion_radius_m)
    throw std::invalid_argument("nearfield_attenuation: point inside the source exclusion radius");
  const Point& r0_point = scenario.cancellation_point;
  const double r0 = r0_point.norm();
  const double ratio = r0 / r1;
  const double sep = separation(p1, r0_point);
  const double rad = radial_difference(p1, r0_point);
  const double rho =
      broadband_correlation(spectrum, {sep, rad / scenario.c_mps, scenario.c_mps});
  // >= (1 - r0/r1)^2 analytically; the clamp only absorbs summation rounding.
  return std::max(0.0, 1.0 + ratio * ratio - 2.0 * ratio * rho);
}

double nearfield_attenuation_limit(const PowerSpectrum& spectrum, double d_m, double c_mps) {
  if (!(d_m >= 0.0))
    throw std::invalid_argument("nearfield_attenuation_limit: d must be >= 0");
  const double rho = broadband_correlation(spectrum, {d_m, d_m / c_mps, c_mps});
  return std::max(0.0, 2.0 * (1.0 - rho));
}

double farfield_attenuation(const PowerSpectrum& spectrum, const Scenario& scenario, double d_m) {
  validate(scenario);
  if (scenario.mode != ControlMode::FarField)
    throw std::invalid_argument("farfield_attenuation: scenario is not far-field");
  if (!(d_m >= 0.0)) throw std::invalid_argument("farfield_attenuation: d must be >= 0");
  const double rho = broadband_correlation(spectrum, {d_m, 0.0, scenario.c_mps});
  return std::max(0.0, (1.0 + scenario.gain_ratio) * (1.0 - rho * rho));
}

double attenuation_db(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("attenuation_db: eps must be >= 0");
  if (eps == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(eps);
}

std::optional<double> zone_width(const PowerSpectrum& spectrum, ControlMode mode,
                                 double threshold_eps, double c_mps, double gain_ratio,
                                 double search_max_m) {
  if (!(threshold_eps > 0.0 && threshold_eps < 1.0))
    throw std::invalid_argument("zone_width: threshold must lie in (0, 1)");
  const auto curve = [&](double d) {
    return limit_or_farfield(spectrum, mode, d, c_mps, gain_ratio);
  };

  // eps(0) = 0, so the first scan step that reaches the threshold brackets
  // the smallest positive root.
  const double scan_step = 1e-3;
  double lo = 0.0;
  double hi = scan_step;
  bool bracketed = false;
  while (hi <= search_max_m) {
    if (curve(hi) >= threshold_eps) {
      bracketed = true;
      break;
    }
    lo = hi;
    hi += scan_step;
  }
  if (!bracketed) return std::nullopt;

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double value = curve(mid);
    if (std::abs(value - threshold_eps) < 1e-9) return 2.0 * mid;
    if (value < threshold_eps)
      lo = mid;
    else
      hi = mid;
  }
  return 2.0 * 0.5 * (lo + hi);
}

AttenuationField attenuation_field_2d(const PowerSpectrum& spectrum, const Scenario& scenario,
                                      const GridSpec& grid, double exclusion_radius_m) {
  validate(scenario);
  AttenuationField field;
  field.x0 = grid.x_min;
  field.y0 = grid.y_min;
  field.spacing = grid.spacing;
  field.nx = grid.nx();
  field.ny = grid.ny();
  field.epsilon.assign(field.nx * field.ny, std::numeric_limits<double>::quiet_NaN());
  field.masked.assign(field.nx * field.ny, 0);

  parallel_chunks(field.ny, [&](std::size_t j_begin, std::size_t j_end) {
    for (std::size_t j = j_begin; j < j_end; ++j) {
      for (std::size_t i = 0; i < field.nx; ++i) {
        const Point p{field.x(i), field.y(j), 0.0};
        const std::size_t idx = field.index(i, j);
        if (scenario.mode == ControlMode::NearField) {
          if (p.norm() < exclusion_radius_m) {
            field.masked[idx] = 1;
            continue;
          }
          field.epsilon[idx] = nearfield_attenuation(spectrum, scenario, p, exclusion_radius_m);
        } else {
          field.epsilon[idx] =
              farfield_attenuation(spectrum, scenario, separation(p, scenario.cancellation_point));
        }
      }
    }
  });
  return field;
}

} // namespace qz
