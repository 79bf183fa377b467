#include "qz/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qz/kahan.hpp"

namespace qz {

namespace {

void validate_grid(const SpectralGrid& grid) {
  if (!(grid.fs_hz > 0.0)) throw std::invalid_argument("spectral grid: fs must be > 0");
  if (grid.m_points < 2 || grid.m_points % 2 != 0)
    throw std::invalid_argument("spectral grid: m_points must be even and >= 2");
}

void validate_stage(const FilterStage& stage, const SpectralGrid& grid) {
  if (stage.order < 1) throw std::invalid_argument("filter stage: order must be >= 1");
  if (!(stage.cutoff_hz > 0.0) || stage.cutoff_hz >= grid.nyquist_hz())
    throw std::invalid_argument("filter stage: cutoff must lie in (0, fs/2)");
}

} // namespace

PowerSpectrum::PowerSpectrum(SpectralGrid grid, std::vector<double> weights)
    : grid_(grid), weights_(std::move(weights)) {
  validate_grid(grid_);
  if (weights_.size() != grid_.m_points)
    throw std::invalid_argument("power spectrum: weight count must equal m_points");

  const std::size_t m_points = grid_.m_points;
  KahanSum total;
  for (std::size_t m = 0; m < m_points; ++m) {
    const double w = weights_[m];
    if (!(w >= 0.0)) throw std::invalid_argument("power spectrum: weights must be >= 0");
    total.add(w);
  }
  for (std::size_t m = 1; m < m_points; ++m) {
    if (weights_[m] != weights_[m_points - m])
      throw std::invalid_argument("power spectrum: weights must satisfy S(m) == S(M-m)");
  }
  total_power_ = total.value();
  if (!(total_power_ > 0.0))
    throw std::invalid_argument("power spectrum: total power must be > 0");
}

double butterworth_gain(const FilterStage& stage, double f_hz) {
  if (!(f_hz >= 0.0)) throw std::invalid_argument("butterworth_gain: f must be >= 0");
  const double exponent = 2.0 * static_cast<double>(stage.order);
  if (stage.kind == FilterKind::LowPass) {
    return 1.0 / (1.0 + std::pow(f_hz / stage.cutoff_hz, exponent));
  }
  // High-pass written as 1/(1 + (fc/f)^2n) so large f stays well conditioned.
  if (f_hz == 0.0) return 0.0;
  return 1.0 / (1.0 + std::pow(stage.cutoff_hz / f_hz, exponent));
}

void validate_signal(const SignalSpec& spec, const SpectralGrid& grid) {
  validate_grid(grid);
  if (const auto* tone = std::get_if<PureTone>(&spec)) {
    if (!(tone->freq_hz > 0.0) || tone->freq_hz >= grid.nyquist_hz())
      throw std::invalid_argument("pure tone: frequency must lie in (0, fs/2)");
    const auto bin = static_cast<std::size_t>(
        std::llround(tone->freq_hz * static_cast<double>(grid.m_points) / grid.fs_hz));
    if (bin == 0 || bin == grid.m_points / 2)
      throw std::invalid_argument("pure tone: nearest bin is 0 or M/2 (degenerate mirror)");
    return;
  }
  const auto& noise = std::get<FilteredNoise>(spec);
  if (noise.stages.empty())
    throw std::invalid_argument("filtered noise: at least one stage required");
  for (const auto& stage : noise.stages) validate_stage(stage, grid);
}

PowerSpectrum synthesize_psd(const SignalSpec& spec, const SpectralGrid& grid) {
  validate_signal(spec, grid);
  const std::size_t m_points = grid.m_points;
  std::vector<double> weights(m_points, 0.0);

  if (const auto* tone = std::get_if<PureTone>(&spec)) {
    const auto bin = static_cast<std::size_t>(
        std::llround(tone->freq_hz * static_cast<double>(m_points) / grid.fs_hz));
    weights[bin] = 0.5;
    weights[m_points - bin] = 0.5;
  } else {
    const auto& noise = std::get<FilteredNoise>(spec);
    // Evaluate the non-negative half and mirror it, so S(m) == S(M-m) holds
    // bitwise by construction.
    for (std::size_t m = 0; m <= m_points / 2; ++m) {
      double gain = 1.0;
      const double f = grid.bin_hz(m);
      for (const auto& stage : noise.stages) gain *= butterworth_gain(stage, f);
      weights[m] = gain;
    }
    for (std::size_t m = 1; m < m_points / 2; ++m) weights[m_points - m] = weights[m];
  }
  return PowerSpectrum(grid, std::move(weights));
}

std::vector<PsdRow> psd_report(const PowerSpectrum& spectrum) {
  const auto& grid = spectrum.grid();
  std::vector<PsdRow> rows;
  rows.reserve(grid.m_points / 2 + 1);
  for (std::size_t m = 0; m <= grid.m_points / 2; ++m)
    rows.push_back({grid.bin_hz(m), spectrum.weights()[m]});
  return rows;
}

std::optional<SignalSpec> preset_signal(std::string_view name) {
  if (name == "tone300") return SignalSpec{PureTone{300.0}};
  if (name == "lpf300")
    return SignalSpec{FilteredNoise{{{FilterKind::LowPass, 32, 300.0}}}};
  if (name == "lpf600")
    return SignalSpec{FilteredNoise{{{FilterKind::LowPass, 32, 600.0}}}};
  if (name == "bpf")
    return SignalSpec{FilteredNoise{
        {{FilterKind::LowPass, 8, 400.0}, {FilterKind::HighPass, 2, 600.0}}}};
  return std::nullopt;
}

} // namespace qz
