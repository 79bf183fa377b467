#include "qz/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <CLI11.hpp>

#include "qz/contour.hpp"
#include "qz/correlation.hpp"
#include "qz/geometry.hpp"
#include "qz/oracle.hpp"
#include "qz/spectral.hpp"
#include "qz/zones.hpp"

namespace qz::cli {

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid number in " + what + ": '" + text + "'");
  }
  if (pos != text.size()) throw ConfigError("invalid number in " + what + ": '" + text + "'");
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, sep)) parts.push_back(item);
  return parts;
}

// A signal is a preset name, "tone:FREQ", or a '+'-joined cascade of
// "lp:ORDER:CUTOFF" / "hp:ORDER:CUTOFF" stages.
SignalSpec parse_signal_text(const std::string& text) {
  if (auto preset = preset_signal(text)) return *preset;
  if (text.rfind("tone:", 0) == 0)
    return PureTone{parse_double(text.substr(5), "--signal tone frequency")};

  FilteredNoise noise;
  for (const auto& token : split(text, '+')) {
    const auto fields = split(token, ':');
    if (fields.size() != 3 || (fields[0] != "lp" && fields[0] != "hp"))
      throw ConfigError("unknown signal '" + text +
                        "' (expected a preset, tone:FREQ, or lp:N:FC+hp:N:FC stages)");
    FilterStage stage;
    stage.kind = fields[0] == "lp" ? FilterKind::LowPass : FilterKind::HighPass;
    const double order = parse_double(fields[1], "--signal stage order");
    if (order < 1.0 || order != std::floor(order))
      throw ConfigError("signal stage order must be a positive integer: '" + token + "'");
    stage.order = static_cast<int>(order);
    stage.cutoff_hz = parse_double(fields[2], "--signal stage cutoff");
    noise.stages.push_back(stage);
  }
  if (noise.stages.empty()) throw ConfigError("signal '" + text + "' has no stages");
  return noise;
}

Point parse_r0(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError("--r0 expects 'x,y' in meters: '" + text + "'");
  return Point{parse_double(parts[0], "--r0"), parse_double(parts[1], "--r0"), 0.0};
}

GridSpec parse_grid(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 5)
    throw ConfigError("--grid expects 'xmin,xmax,ymin,ymax,step' in meters: '" + text + "'");
  GridSpec grid;
  grid.x_min = parse_double(parts[0], "--grid");
  grid.x_max = parse_double(parts[1], "--grid");
  grid.y_min = parse_double(parts[2], "--grid");
  grid.y_max = parse_double(parts[3], "--grid");
  grid.spacing = parse_double(parts[4], "--grid");
  return grid;
}

ControlMode parse_mode(const std::string& text) {
  if (text == "near") return ControlMode::NearField;
  if (text == "far") return ControlMode::FarField;
  throw ConfigError("--mode must be 'near' or 'far': '" + text + "'");
}

class CsvFile {
public:
  explicit CsvFile(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
  }

  void header(std::string_view key, std::string_view value) {
    out_ << "# " << key << " = " << value << '\n';
  }
  void raw(std::string_view line) { out_ << line << '\n'; }
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::ofstream out_;
};

struct CommonOptions {
  std::string signal = "tone300";
  double fs_hz = kDefaultSampleRateHz;
  std::size_t dft_size = kDefaultDftSize;
  double c_mps = kDefaultSoundSpeed;
};

struct SweepOptions {
  double max_m = 0.5;
  double step_m = 0.001;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--signal", common.signal,
                  "signal preset (tone300|lpf300|lpf600|bpf), tone:FREQ, or lp:N:FC+hp:N:FC");
  cmd->add_option("--fs", common.fs_hz, "sampling rate [Hz]");
  cmd->add_option("--dft-size", common.dft_size, "DFT length M (even)");
  cmd->add_option("--c", common.c_mps, "speed of sound [m/s]");
}

void add_sweep(CLI::App* cmd, SweepOptions& sweep) {
  cmd->add_option("--sweep-max", sweep.max_m, "largest separation in the sweep [m]");
  cmd->add_option("--sweep-step", sweep.step_m, "sweep step [m]");
}

PowerSpectrum resolve_spectrum(const CommonOptions& common) {
  const SpectralGrid grid{common.fs_hz, common.dft_size};
  return synthesize_psd(parse_signal_text(common.signal), grid);
}

std::vector<double> sweep_points(const SweepOptions& sweep) {
  if (!(sweep.step_m > 0.0) || !(sweep.max_m >= 0.0))
    throw ConfigError("sweep requires step > 0 and max >= 0");
  std::vector<double> points;
  const auto count = static_cast<std::size_t>(std::floor(sweep.max_m / sweep.step_m + 0.5));
  points.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i)
    points.push_back(static_cast<double>(i) * sweep.step_m);
  return points;
}

void echo_common(CsvFile& file, const std::string& command, const CommonOptions& common) {
  file.header("command", command);
  file.header("signal", common.signal);
  file.header("fs_hz", fmt(common.fs_hz));
  file.header("dft_size", std::to_string(common.dft_size));
  file.header("c_mps", fmt(common.c_mps));
}

double floored_db(double eps) { return std::max(attenuation_db(eps), kReportDbFloor); }

// ---------------------------------------------------------------------------
// subcommands

int run_psd(const CommonOptions& common, const std::string& out_path) {
  const auto spectrum = resolve_spectrum(common);
  const auto rows = psd_report(spectrum);

  CsvFile file(out_path);
  echo_common(file, "psd", common);
  file.raw("freq_hz,psd");
  for (const auto& row : rows) file.raw(fmt(row.freq_hz) + "," + fmt(row.psd));
  std::cout << "wrote " << file.path() << " (" << rows.size() << " rows)\n";
  return 0;
}

int run_corr(const CommonOptions& common, const SweepOptions& sweep, const std::string& corr_mode,
             const std::string& out_path) {
  if (corr_mode != "auto" && corr_mode != "cross")
    throw ConfigError("--corr-mode must be 'auto' or 'cross'");
  const auto spectrum = resolve_spectrum(common);
  const auto points = sweep_points(sweep);

  CsvFile file(out_path);
  echo_common(file, "corr", common);
  file.header("corr_mode", corr_mode);
  file.header("sweep_max_m", fmt(sweep.max_m));
  file.header("sweep_step_m", fmt(sweep.step_m));
  file.raw("delta_r_m,rho");
  for (double d : points) {
    const double rho =
        corr_mode == "auto"
            ? broadband_correlation(spectrum, {d, 0.0, common.c_mps})
            : cross_correlation(spectrum, d, d, 1.0, 1.0, common.c_mps);
    file.raw(fmt(d) + "," + fmt(rho));
  }
  std::cout << "wrote " << file.path() << " (" << points.size() << " rows)\n";
  return 0;
}

int run_zone1d(const CommonOptions& common, const SweepOptions& sweep, const std::string& mode_text,
               double gain_ratio, double threshold_db, const std::string& out_path) {
  if (!(threshold_db < 0.0)) throw ConfigError("--threshold-db must be < 0");
  const ControlMode mode = parse_mode(mode_text);
  const auto spectrum = resolve_spectrum(common);
  const auto points = sweep_points(sweep);
  const double threshold_eps = std::pow(10.0, threshold_db / 10.0);

  const auto width = zone_width(spectrum, mode, threshold_eps, common.c_mps, gain_ratio);

  CsvFile file(out_path);
  echo_common(file, "zone1d", common);
  file.header("mode", mode_text);
  file.header("gain_ratio", fmt(gain_ratio));
  file.header("threshold_db", fmt(threshold_db));
  file.header("sweep_max_m", fmt(sweep.max_m));
  file.header("sweep_step_m", fmt(sweep.step_m));
  file.header("zone_width_m", width ? fmt(*width) : "no crossing");
  file.raw("delta_r_m,epsilon,attenuation_db");
  for (double d : points) {
    const double eps = mode == ControlMode::NearField
                           ? nearfield_attenuation_limit(spectrum, d, common.c_mps)
                           : farfield_attenuation(
                                 spectrum,
                                 Scenario{Point{1.0, 0.0, 0.0}, common.c_mps, ControlMode::FarField,
                                          gain_ratio},
                                 d);
    file.raw(fmt(d) + "," + fmt(eps) + "," + fmt(floored_db(eps)));
  }
  if (width)
    std::cout << "zone_width_m = " << fmt(*width) << "\n";
  else
    std::cout << "zone_width_m = no crossing within search range\n";
  std::cout << "wrote " << file.path() << " (" << points.size() << " rows)\n";
  return 0;
}

int run_zone2d(const CommonOptions& common, const std::string& mode_text, const std::string& r0_text,
               const std::string& grid_text, double threshold_db, const std::string& out_prefix) {
  if (!(threshold_db < 0.0)) throw ConfigError("--threshold-db must be < 0");
  if (parse_mode(mode_text) != ControlMode::NearField)
    throw ConfigError("zone2d supports near-field mode only");
  const auto spectrum = resolve_spectrum(common);
  const GridSpec grid = parse_grid(grid_text);

  Scenario scenario;
  scenario.cancellation_point = parse_r0(r0_text);
  scenario.c_mps = common.c_mps;
  scenario.mode = ControlMode::NearField;
  validate(scenario);

  const auto field = attenuation_field_2d(spectrum, scenario, grid);
  const auto contours = extract_iso_contour(field, threshold_db);

  const auto echo_scenario = [&](CsvFile& file) {
    echo_common(file, "zone2d", common);
    file.header("mode", mode_text);
    file.header("threshold_db", fmt(threshold_db));
    file.header("grid", grid_text);
    file.header("source", "0,0");
    file.header("cancellation_point",
                fmt(scenario.cancellation_point.x) + "," + fmt(scenario.cancellation_point.y));
  };

  CsvFile field_file(out_prefix + "_field.csv");
  echo_scenario(field_file);
  field_file.raw("x_m,y_m,epsilon");
  std::size_t field_rows = 0;
  for (std::size_t j = 0; j < field.ny; ++j) {
    for (std::size_t i = 0; i < field.nx; ++i) {
      if (field.is_masked(i, j)) continue;
      field_file.raw(fmt(field.x(i)) + "," + fmt(field.y(j)) + "," + fmt(field.at(i, j)));
      ++field_rows;
    }
  }

  CsvFile contour_file(out_prefix + "_contour.csv");
  echo_scenario(contour_file);
  contour_file.header("polylines", std::to_string(contours.polylines.size()));

  if (contours.polylines.empty()) {
    contour_file.raw("polyline_id,vertex_id,x_m,y_m");
    std::cout << "contour empty: no grid cell crosses " << fmt(threshold_db) << " dB\n";
    std::cout << "wrote " << field_file.path() << " (" << field_rows << " rows)\n";
    std::cout << "wrote " << contour_file.path() << " (0 rows)\n";
    return 0;
  }

  // Zone extent: farthest contour point from the cancellation point, the
  // quoted "size" of a zone of quiet. The pairwise diameter of the same
  // polyline is reported alongside; for the crescent-shaped near-field
  // zones it runs roughly twice as large (tip to tip across the shell).
  const auto extent = contour_extent(contours);
  double reach = 0.0;
  bool any_closed = false;
  for (const auto& polyline : contours.polylines) any_closed |= polyline.closed;
  for (const auto& polyline : contours.polylines) {
    if (any_closed && !polyline.closed) continue;
    for (const auto& v : polyline.vertices) {
      reach = std::max(reach, std::hypot(v.x - scenario.cancellation_point.x,
                                         v.y - scenario.cancellation_point.y));
    }
  }

  contour_file.header("zone_extent_m", fmt(reach));
  contour_file.header("contour_max_diameter_m", fmt(extent.max_diameter_m));
  contour_file.header("contour_area_m2", extent.area_m2 ? fmt(*extent.area_m2) : "none");
  contour_file.raw("polyline_id,vertex_id,x_m,y_m");
  std::size_t contour_rows = 0;
  for (std::size_t p = 0; p < contours.polylines.size(); ++p) {
    const auto& vertices = contours.polylines[p].vertices;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      contour_file.raw(std::to_string(p) + "," + std::to_string(v) + "," + fmt(vertices[v].x) +
                       "," + fmt(vertices[v].y));
      ++contour_rows;
    }
  }

  std::cout << "contour_polylines = " << contours.polylines.size() << "\n";
  std::cout << "zone_extent_m = " << fmt(reach) << "\n";
  std::cout << "contour_max_diameter_m = " << fmt(extent.max_diameter_m) << "\n";
  std::cout << "contour_area_m2 = " << (extent.area_m2 ? fmt(*extent.area_m2) : "none") << "\n";
  std::cout << "wrote " << field_file.path() << " (" << field_rows << " rows)\n";
  std::cout << "wrote " << contour_file.path() << " (" << contour_rows << " rows)\n";
  return 0;
}

int run_oracle(const CommonOptions& common, const SweepOptions& sweep, std::uint64_t n_directions,
               std::uint64_t seed, double tolerance, const std::string& out_path) {
  if (!(tolerance > 0.0)) throw ConfigError("--tolerance must be > 0");
  const auto spectrum = resolve_spectrum(common);
  const auto points = sweep_points(sweep);
  const OracleConfig config{n_directions, seed};

  CsvFile file(out_path);
  echo_common(file, "oracle", common);
  file.header("n_directions", std::to_string(n_directions));
  file.header("seed", std::to_string(seed));
  file.header("tolerance", fmt(tolerance));
  file.header("sweep_max_m", fmt(sweep.max_m));
  file.header("sweep_step_m", fmt(sweep.step_m));
  file.raw("delta_r_m,rho_analytic,rho_oracle,abs_err");

  double max_abs_err = 0.0;
  for (double d : points) {
    const double analytic = broadband_correlation(spectrum, {d, 0.0, common.c_mps});
    const double estimate = oracle_correlation(spectrum, d, 0.0, common.c_mps, config);
    const double abs_err = std::abs(estimate - analytic);
    max_abs_err = std::max(max_abs_err, abs_err);
    file.raw(fmt(d) + "," + fmt(analytic) + "," + fmt(estimate) + "," + fmt(abs_err));
  }

  std::cout << "max_abs_err = " << fmt(max_abs_err) << "\n";
  std::cout << "wrote " << file.path() << " (" << points.size() << " rows)\n";
  if (max_abs_err > tolerance) {
    std::cerr << "error: oracle deviation " << fmt(max_abs_err) << " exceeds tolerance "
              << fmt(tolerance) << "\n";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// config file: flat "key = value" lines whose keys are the long option names
// of the invoked subcommand. Command-line flags override file values.

std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto strip = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      const auto end = s.find_last_not_of(" \t\r");
      return begin == std::string::npos ? std::string{} : s.substr(begin, end - begin + 1);
    };
    const std::string stripped = strip(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config " + path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = strip(stripped.substr(0, eq));
    const std::string value = strip(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config " + path + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

std::vector<std::string> apply_config_file(const std::vector<std::string>& args) {
  std::vector<std::string> result;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config expects a file path");
      config_path = args[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    } else {
      result.push_back(arg);
    }
  }
  if (config_path.empty()) return result;

  const auto file_args = config_file_args(config_path);
  // Insert file values right after the subcommand token so later
  // command-line flags take precedence.
  auto insert_at = std::find_if(result.begin(), result.end(),
                                [](const std::string& a) { return a.empty() || a[0] != '-'; });
  if (insert_at != result.end()) ++insert_at;
  result.insert(insert_at, file_args.begin(), file_args.end());
  return result;
}

} // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"diffuse-field zones of quiet: correlation, attenuation and contour tables",
               "quietzone"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  CommonOptions common;
  SweepOptions sweep;
  SweepOptions oracle_sweep;
  oracle_sweep.step_m = 0.05;

  std::string corr_mode = "auto";
  std::string mode_text = "near";
  std::string r0_text = "0.2,0";
  std::string grid_text = "0.05,0.45,-0.2,0.2,0.0025";
  double gain_ratio = kDefaultGainRatio;
  double threshold_db = -10.0;
  std::uint64_t n_directions = 100000;
  std::uint64_t seed = 12345;
  double tolerance = 0.01;
  std::string out_psd = "psd.csv";
  std::string out_corr = "corr.csv";
  std::string out_zone1d = "zone1d.csv";
  std::string out_zone2d = "zone2d";
  std::string out_oracle = "oracle.csv";

  CLI::App* psd = app.add_subcommand("psd", "power spectral density table of a signal");
  add_common(psd, common);
  psd->add_option("--out", out_psd, "output CSV path");

  CLI::App* corr = app.add_subcommand("corr", "spatial correlation sweep");
  add_common(corr, common);
  add_sweep(corr, sweep);
  corr->add_option("--corr-mode", corr_mode, "auto (primary field) or cross (primary-secondary)");
  corr->add_option("--out", out_corr, "output CSV path");

  CLI::App* zone1d = app.add_subcommand("zone1d", "attenuation curve and zone width");
  add_common(zone1d, common);
  add_sweep(zone1d, sweep);
  zone1d->add_option("--mode", mode_text, "near or far");
  zone1d->add_option("--gain-ratio", gain_ratio, "far-field secondary/primary power ratio");
  zone1d->add_option("--threshold-db", threshold_db, "zone threshold [dB], < 0");
  zone1d->add_option("--out", out_zone1d, "output CSV path");

  CLI::App* zone2d = app.add_subcommand("zone2d", "2-D attenuation field and iso-contour");
  add_common(zone2d, common);
  zone2d->add_option("--mode", mode_text, "must be near");
  zone2d->add_option("--r0", r0_text, "cancellation point 'x,y' [m]");
  zone2d->add_option("--grid", grid_text, "evaluation grid 'xmin,xmax,ymin,ymax,step' [m]");
  zone2d->add_option("--threshold-db", threshold_db, "contour level [dB], < 0");
  zone2d->add_option("--out", out_zone2d, "output prefix (<prefix>_field.csv, <prefix>_contour.csv)");

  CLI::App* oracle = app.add_subcommand("oracle", "plane-wave direction-sampling validation");
  add_common(oracle, common);
  add_sweep(oracle, oracle_sweep);
  oracle->add_option("--n-directions", n_directions, "sampled plane-wave directions");
  oracle->add_option("--seed", seed, "SplitMix64 seed");
  oracle->add_option("--tolerance", tolerance, "max allowed |oracle - analytic|");
  oracle->add_option("--out", out_oracle, "output CSV path");

  for (auto* cmd : {psd, corr, zone1d, zone2d, oracle})
    cmd->add_option("--config", "flat key=value config file; flags override")->expected(1);

  try {
    std::vector<std::string> effective = apply_config_file(args);
    std::reverse(effective.begin(), effective.end());
    app.parse(std::move(effective));

    if (psd->parsed()) return run_psd(common, out_psd);
    if (corr->parsed()) return run_corr(common, sweep, corr_mode, out_corr);
    if (zone1d->parsed())
      return run_zone1d(common, sweep, mode_text, gain_ratio, threshold_db, out_zone1d);
    if (zone2d->parsed())
      return run_zone2d(common, mode_text, r0_text, grid_text, threshold_db, out_zone2d);
    if (oracle->parsed())
      return run_oracle(common, oracle_sweep, n_directions, seed, tolerance, out_oracle);
    std::cerr << "error: no subcommand given\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace qz::cli
