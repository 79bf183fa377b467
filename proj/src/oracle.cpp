#include "qz/oracle.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qz/kahan.hpp"

namespace qz {

namespace {

// SplitMix64 (Steele, Lea & Flood 2014). The k-th output of a stream is
// mix(seed + (k+1)*gamma), so any draw is addressable in O(1) and the
// stream is identical no matter how directions are distributed over
// threads.
constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ull;

std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t splitmix_at(std::uint64_t seed, std::uint64_t k) {
  return splitmix_mix(seed + (k + 1) * kSplitMixGamma);
}

double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53; // [0, 1)
}

// Folded non-negative-frequency weights: S(0), 2 S(m), S(M/2). The mirror
// half is bitwise equal, so the fold is exact.
std::vector<double> folded_weights(const PowerSpectrum& spectrum) {
  const auto& w = spectrum.weights();
  const std::size_t half = spectrum.grid().m_points / 2;
  std::vector<double> folded(half + 1);
  folded[0] = w[0];
  for (std::size_t m = 1; m < half; ++m) folded[m] = 2.0 * w[m];
  folded[half] = w[half];
  return folded;
}

struct SparseLine {
  double omega;
  double weight;
};

// Power-weighted cosine sum over the folded grid, evaluated per direction.
// Line spectra use the sparse list directly; dense spectra march the
// Chebyshev recurrence cos((m+1)x) = 2 cos(x) cos(mx) - cos((m-1)x), four
// independent lags at a time so the recurrence chains overlap.
class AutocorrEvaluator {
public:
  AutocorrEvaluator(const PowerSpectrum& spectrum)
      : folded_(folded_weights(spectrum)),
        d_omega_(2.0 * std::numbers::pi * spectrum.grid().fs_hz /
                 static_cast<double>(spectrum.grid().m_points)) {
    for (std::size_t m = 0; m < folded_.size(); ++m)
      if (folded_[m] != 0.0) sparse_.push_back({static_cast<double>(m) * d_omega_, folded_[m]});
    total_ = 0.0;
    if (use_sparse()) {
      for (const auto& line : sparse_) total_ += line.weight;
    } else {
      for (double w : folded_) total_ += w;
    }
  }

  bool use_sparse() const { return sparse_.size() <= 64; }
  double total() const { return total_; }

  double numerator(double tau) const {
    if (use_sparse()) {
      double acc = 0.0;
      for (const auto& line : sparse_) acc += line.weight * std::cos(line.omega * tau);
      return acc;
    }
    double lanes[4] = {tau, tau, tau, tau};
    double out[4];
    numerator4(lanes, out);
    return out[0];
  }

  void numerator4(const double tau[4], double out[4]) const {
    if (use_sparse()) {
      for (int k = 0; k < 4; ++k) out[k] = numerator(tau[k]);
      return;
    }
    double c_prev[4], c_cur[4], two_c[4], acc[4];
    for (int k = 0; k < 4; ++k) {
      const double x = d_omega_ * tau[k];
      c_prev[k] = 1.0;
      c_cur[k] = std::cos(x);
      two_c[k] = 2.0 * c_cur[k];
      acc[k] = folded_[0] + folded_[1] * c_cur[k];
    }
    for (std::size_t m = 2; m < folded_.size(); ++m) {
      const double w = folded_[m];
      for (int k = 0; k < 4; ++k) {
        const double c_next = two_c[k] * c_cur[k] - c_prev[k];
        c_prev[k] = c_cur[k];
        c_cur[k] = c_next;
        acc[k] += w * c_next;
      }
    }
    for (int k = 0; k < 4; ++k) out[k] = acc[k];
  }

private:
  std::vector<double> folded_;
  double d_omega_;
  std::vector<SparseLine> sparse_;
  double total_;
};

} // namespace

double signal_autocorrelation(const PowerSpectrum& spectrum, double lag_s) {
  if (!(spectrum.total_power() > 0.0))
    throw std::invalid_argument("signal_autocorrelation: zero-power spectrum");
  const auto& grid = spectrum.grid();
  const auto& weights = spectrum.weights();
  const std::size_t half = grid.m_points / 2;
  const double d_omega = 2.0 * std::numbers::pi * grid.fs_hz / static_cast<double>(grid.m_points);

  KahanSum numerator;
  KahanSum denominator;
  for (std::size_t m = 0; m <= half; ++m) {
    const double w = (m == 0 || m == half) ? weights[m] : 2.0 * weights[m];
    if (w == 0.0) continue;
    numerator.add(w * std::cos(static_cast<double>(m) * d_omega * lag_s));
    denominator.add(w);
  }
  return numerator.value() / denominator.value();
}

double oracle_correlation(const PowerSpectrum& spectrum, double delta_r_m, double delta_t_s,
                          double c_mps, const OracleConfig& config) {
  if (config.n_directions < 1)
    throw std::invalid_argument("oracle: n_directions must be >= 1");
  if (!(c_mps > 0.0)) throw std::invalid_argument("oracle: c must be > 0");
  if (!(delta_r_m >= 0.0)) throw std::invalid_argument("oracle: delta_r must be >= 0");

  const AutocorrEvaluator eval(spectrum);
  const double den = eval.total();
  const std::uint64_t n = config.n_directions;

  // The separation vector lies along z, so each plane wave contributes the
  // exact autocorrelation at lag dt - (khat . dr)/c.
  const auto direction_tau = [&](std::uint64_t i) {
    const double u = to_unit_interval(splitmix_at(config.seed, 2 * i));
    const double phi =
        2.0 * std::numbers::pi * to_unit_interval(splitmix_at(config.seed, 2 * i + 1));
    const double cos_theta = 2.0 * u - 1.0;
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const double khat[3] = {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
    const double dr[3] = {0.0, 0.0, delta_r_m};
    const double projection = khat[0] * dr[0] + khat[1] * dr[1] + khat[2] * dr[2];
    return delta_t_s - projection / c_mps;
  };

  constexpr std::uint64_t kBatch = 8192;
  const std::uint64_t n_batches = (n + kBatch - 1) / kBatch;
  std::vector<double> partials(n_batches, 0.0);

  const auto run_batch = [&](std::uint64_t b) {
    const std::uint64_t begin = b * kBatch;
    const std::uint64_t end = std::min(n, begin + kBatch);
    KahanSum batch_sum;
    std::uint64_t i = begin;
    for (; i + 4 <= end; i += 4) {
      double tau[4];
      for (int k = 0; k < 4; ++k) tau[k] = direction_tau(i + static_cast<std::uint64_t>(k));
      double num[4];
      eval.numerator4(tau, num);
      for (int k = 0; k < 4; ++k) batch_sum.add(num[k] / den);
    }
    for (; i < end; ++i) batch_sum.add(eval.numerator(direction_tau(i)) / den);
    partials[b] = batch_sum.value();
  };

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::uint64_t n_threads = std::min<std::uint64_t>(hw, n_batches);
  if (n_threads <= 1) {
    for (std::uint64_t b = 0; b < n_batches; ++b) run_batch(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::uint64_t t = 0; t < n_threads; ++t) {
      workers.emplace_back([&] {
        for (std::uint64_t b = next.fetch_add(1); b < n_batches; b = next.fetch_add(1))
          run_batch(b);
      });
    }
    for (auto& w : workers) w.join();
  }

  // Reduce in fixed batch order: bitwise identical for a given seed no
  // matter the thread schedule.
  KahanSum sum;
  for (double partial : partials) sum.add(partial);
  return sum.value() / static_cast<double>(n);
}

} // namespace qz
