#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "qz/geometry.hpp"
#include "qz/spectral.hpp"

namespace qz {

/// Cells closer to the source than this carry no value: the 1/r monopole
/// model is not valid arbitrarily close to a physical source.
inline constexpr double kDefaultExclusionRadius = 0.01; // m

/// Floor applied when reporting attenuation_db of a perfect null.
inline constexpr double kReportDbFloor = -100.0;

/// Rectangular evaluation grid for 2-D attenuation maps.
struct GridSpec {
  double x_min = 0.05;
  double x_max = 0.45;
  double y_min = -0.2;
  double y_max = 0.2;
  double spacing = 0.0025; // m

  std::size_t nx() const;
  std::size_t ny() const;
};

/// Sampled attenuation ratio over a planar grid. Values are epsilon
/// (dimensionless, >= 0); masked nodes hold no value.
struct AttenuationField {
  double x0 = 0.0;
  double y0 = 0.0;
  double spacing = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> epsilon;      // row-major, index = j*nx + i
  std::vector<std::uint8_t> masked; // 1 = excluded

  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * spacing; }
  double y(std::size_t j) const { return y0 + static_cast<double>(j) * spacing; }
  double at(std::size_t i, std::size_t j) const { return epsilon[index(i, j)]; }
  bool is_masked(std::size_t i, std::size_t j) const { return masked[index(i, j)] != 0; }
};

/// Attenuation ratio at p1 when a monopole at the origin cancels the
/// primary diffuse field at the scenario's cancellation point:
/// eps = 1 + (r0/r1)^2 - 2 (r0/r1) rho(|p1 - r0|, (r1 - r0)/c).
/// Exactly zero at the cancellation point. Rejects points inside the
/// exclusion radius around the source.
double nearfield_attenuation(const PowerSpectrum& spectrum, const Scenario& scenario,
                             const Point& p1,
                             double exclusion_radius_m = kDefaultExclusionRadius);

/// On-axis r1 ~ r0 limit of the near-field attenuation at distance d from
/// the cancellation point: eps = 2 (1 - rho(d, d/c)).
double nearfield_attenuation_limit(const PowerSpectrum& spectrum, double d_m, double c_mps);

/// Far-field attenuation at distance d from the cancellation point when the
/// secondary field is itself diffuse: eps = (1 + g) (1 - rho(d, 0)^2).
double farfield_attenuation(const PowerSpectrum& spectrum, const Scenario& scenario, double d_m);

/// 10*log10(eps); eps = 0 yields -infinity (reports clamp to kReportDbFloor).
double attenuation_db(double eps);

/// Width 2*d of the zone where the on-axis attenuation curve stays below
/// threshold_eps: d is the smallest positive crossing of eps(d) =
/// threshold_eps, bracketed on a fine scan and polished by bisection to
/// |eps - threshold| < 1e-9. Returns nullopt when the curve never reaches
/// the threshold within search_max_m.
std::optional<double> zone_width(const PowerSpectrum& spectrum, ControlMode mode,
                                 double threshold_eps, double c_mps,
                                 double gain_ratio = kDefaultGainRatio,
                                 double search_max_m = 2.0);

/// Evaluates the attenuation ratio over a planar grid. Near-field mode uses
/// the general expression with the true r0/r1 per node; far-field mode uses
/// the separation from the cancellation point. Nodes inside the exclusion
/// radius are masked. Deterministic for fixed inputs; rows are evaluated in
/// parallel (cells are independent).
AttenuationField attenuation_field_2d(const PowerSpectrum& spectrum, const Scenario& scenario,
                                      const GridSpec& grid,
                                      double exclusion_radius_m = kDefaultExclusionRadius);

} // namespace qz
