#pragma once

#include <cstdint>

#include "qz/spectral.hpp"

namespace qz {

/// Direction-sampling setup for the plane-wave oracle. Draws come from the
/// counter-based SplitMix64 generator, so estimates are bitwise reproducible
/// for a given seed regardless of how the work is split across threads.
struct OracleConfig {
  std::uint64_t n_directions = 100000; // >= 1
  std::uint64_t seed = 0x5eed5eed;
};

/// Normalized signal autocorrelation R(tau)/R(0) from the PSD:
/// the power-weighted cosine sum over the grid (Wiener-Khinchin bridge).
/// Exactly 1 at tau = 0. Computed locally, without the sinc kernel, so the
/// oracle stays independent of the correlation module.
double signal_autocorrelation(const PowerSpectrum& spectrum, double lag_s);

/// Brute-force estimate of the diffuse-field correlation: averages the
/// exact per-direction autocorrelation R(dt - (khat . dr)/c) over unit
/// directions sampled uniformly on the sphere (cos(theta) uniform on
/// [-1, 1], azimuth uniform on [0, 2pi)), with the separation along a fixed
/// axis. The uniform-direction average reproduces the sinc weighting of the
/// analytic model, which is exactly the claim this estimator checks.
double oracle_correlation(const PowerSpectrum& spectrum, double delta_r_m, double delta_t_s,
                          double c_mps, const OracleConfig& config);

} // namespace qz
