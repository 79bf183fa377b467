#pragma once

#include "qz/spectral.hpp"

namespace qz {

/// Arguments of the spatial-temporal correlation coefficient.
struct CorrelationQuery {
  double delta_r_m = 0.0; // point separation |r1 - r0|, >= 0
  double delta_t_s = 0.0; // time lag, any sign
  double c_mps = 343.0;   // speed of sound, > 0
};

/// sin(x)/x with sinc(0) = 1. Even in x.
double sinc(double x);

/// Diffuse-field correlation of a pure tone: sinc(k dr) * cos(w dt).
double puretone_correlation(double f_hz, const CorrelationQuery& q);

/// Diffuse-field correlation of a broadband signal: the PSD-weighted
/// discrete sum of sinc(w dr / c) * cos(w dt) over the spectrum grid,
/// normalized by total power. Bins above M/2 enter at their negative
/// frequencies; since both kernel factors are even and the spectrum is
/// symmetric, the sum is folded onto m in [0, M/2] with doubled interior
/// weights. Accumulation is compensated and runs in ascending bin order,
/// so rho(0, 0) == 1 exactly.
double broadband_correlation(const PowerSpectrum& spectrum, const CorrelationQuery& q);

/// Normalized primary-secondary cross-correlation at a point with source
/// distances r1 (observation) and r0 (cancellation):
/// -(r0/r1) * rho(delta_r_sep, delta_r_rad / c).
double cross_correlation(const PowerSpectrum& spectrum, double delta_r_sep_m,
                         double delta_r_rad_m, double r0_m, double r1_m, double c_mps);

} // namespace qz
