#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace qz {

inline constexpr double kDefaultSampleRateHz = 2000.0;
inline constexpr std::size_t kDefaultDftSize = 4096;

enum class FilterKind { LowPass, HighPass };

/// One analytic Butterworth stage described by its magnitude-squared
/// response; the cascade of stages shapes a unit white-noise input.
struct FilterStage {
  FilterKind kind = FilterKind::LowPass;
  int order = 1;          // >= 1
  double cutoff_hz = 0.0; // > 0, below Nyquist of any grid it is bound to
};

struct PureTone {
  double freq_hz = 0.0;
};

struct FilteredNoise {
  std::vector<FilterStage> stages; // applied as a product of power gains
};

/// Declarative excitation signal: a pure tone or white noise shaped by a
/// cascade of Butterworth stages.
using SignalSpec = std::variant<PureTone, FilteredNoise>;

/// Discrete frequency grid of an M-point DFT at sampling rate fs. Bin m
/// carries f = m*fs/M for m <= M/2; bins above M/2 represent the negative
/// frequencies f - fs.
struct SpectralGrid {
  double fs_hz = kDefaultSampleRateHz;
  std::size_t m_points = kDefaultDftSize; // even, >= 2

  double bin_hz(std::size_t m) const { return static_cast<double>(m) * fs_hz / static_cast<double>(m_points); }
  double signed_bin_hz(std::size_t m) const {
    return m <= m_points / 2 ? bin_hz(m) : bin_hz(m) - fs_hz;
  }
  double nyquist_hz() const { return 0.5 * fs_hz; }
};

/// Discrete one-sided-symmetric power spectral density on a SpectralGrid.
/// Immutable once constructed; construction validates non-negativity,
/// conjugate symmetry S(m) == S(M-m) and positive total power.
class PowerSpectrum {
public:
  PowerSpectrum(SpectralGrid grid, std::vector<double> weights);

  const SpectralGrid& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_power() const { return total_power_; }

private:
  SpectralGrid grid_;
  std::vector<double> weights_;
  double total_power_ = 0.0;
};

/// Magnitude-squared Butterworth response of one stage at frequency f >= 0.
/// Low-pass: 1/(1 + (f/fc)^(2n)); high-pass: the complementary form.
/// Result lies in [0, 1].
double butterworth_gain(const FilterStage& stage, double f_hz);

/// Builds the discrete PSD of a signal on the grid. Filtered noise takes the
/// per-bin product of stage gains at |f_m| (signed-frequency mapping), so the
/// two spectrum halves are bitwise mirrors. A pure tone puts equal mass on
/// the bin nearest freq_hz and its mirror; tones that snap to bin 0 or M/2
/// are rejected.
PowerSpectrum synthesize_psd(const SignalSpec& spec, const SpectralGrid& grid);

struct PsdRow {
  double freq_hz;
  double psd;
};

/// Non-negative-frequency table (f_m, S(m)) for m in [0, M/2].
std::vector<PsdRow> psd_report(const PowerSpectrum& spectrum);

/// Named signal presets: tone300, lpf300, lpf600, bpf.
std::optional<SignalSpec> preset_signal(std::string_view name);

/// Throws std::invalid_argument when the spec cannot be bound to the grid.
void validate_signal(const SignalSpec& spec, const SpectralGrid& grid);

} // namespace qz
