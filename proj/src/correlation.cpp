#include "qz/correlation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qz/kahan.hpp"

namespace qz {

double sinc(double x) {
  // Below ~1e-8 the quadratic term is under double precision; the Taylor
  // form also covers x == 0.
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double puretone_correlation(double f_hz, const CorrelationQuery& q) {
  if (!(f_hz > 0.0)) throw std::invalid_argument("puretone_correlation: f must be > 0");
  if (!(q.c_mps > 0.0)) throw std::invalid_argument("correlation query: c must be > 0");
  if (!(q.delta_r_m >= 0.0))
    throw std::invalid_argument("correlation query: delta_r must be >= 0");
  const double omega = 2.0 * std::numbers::pi * f_hz;
  return sinc(omega * q.delta_r_m / q.c_mps) * std::cos(omega * q.delta_t_s);
}

double broadband_correlation(const PowerSpectrum& spectrum, const CorrelationQuery& q) {
  if (!(q.c_mps > 0.0)) throw std::invalid_argument("correlation query: c must be > 0");
  if (!(q.delta_r_m >= 0.0))
    throw std::invalid_argument("correlation query: delta_r must be >= 0");
  if (!(spectrum.total_power() > 0.0))
    throw std::invalid_argument("broadband_correlation: zero-power spectrum");

  const auto& grid = spectrum.grid();
  const auto& weights = spectrum.weights();
  const std::size_t half = grid.m_points / 2;
  const double d_omega = 2.0 * std::numbers::pi * grid.fs_hz / static_cast<double>(grid.m_points);

  // S(m) == S(M-m) and both kernel factors are even in frequency, so the
  // negative-frequency bins fold onto m in [1, M/2-1] with weight 2.
  // Numerator and denominator accumulate over the same terms in the same
  // order, which makes rho(0, 0) == 1 exact.
  KahanSum numerator;
  KahanSum denominator;
  for (std::size_t m = 0; m <= half; ++m) {
    const double w = (m == 0 || m == half) ? weights[m] : 2.0 * weights[m];
    if (w == 0.0) continue;
    const double omega = static_cast<double>(m) * d_omega;
    numerator.add(w * sinc(omega * q.delta_r_m / q.c_mps) * std::cos(omega * q.delta_t_s));
    denominator.add(w);
  }
  return numerator.value() / denominator.value();
}

double cross_correlation(const PowerSpectrum& spectrum, double delta_r_sep_m,
                         double delta_r_rad_m, double r0_m, double r1_m, double c_mps) {
  if (!(r0_m > 0.0)) throw std::invalid_argument("cross_correlation: r0 must be > 0");
  if (!(r1_m > 0.0)) throw std::invalid_argument("cross_correlation: r1 must be > 0");
  const CorrelationQuery q{delta_r_sep_m, delta_r_rad_m / c_mps, c_mps};
  return -(r0_m / r1_m) * broadband_correlation(spectrum, q);
}

} // namespace qz
