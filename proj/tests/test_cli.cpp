#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qz/cli.hpp"

namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("qz_cli_" + name)).string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Csv {
  std::map<std::string, std::string> headers;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& path) {
  Csv csv;
  bool saw_columns = false;
  for (const auto& line : read_lines(path)) {
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find(" = ");
      REQUIRE(eq != std::string::npos);
      csv.headers[line.substr(2, eq - 2)] = line.substr(eq + 3);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream stream(line);
    std::string cell;
    while (std::getline(stream, cell, ',')) cells.push_back(cell);
    if (!saw_columns) {
      csv.column_names = cells;
      saw_columns = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::stod(c));
    csv.rows.push_back(row);
  }
  return csv;
}

int run_cli(std::initializer_list<std::string> args) {
  return qz::cli::run(std::vector<std::string>(args));
}

} // namespace

TEST_CASE("cli psd: tone emits a single line, filters match their cutoff") {
  const auto tone_out = temp_path("psd_tone.csv");
  REQUIRE(run_cli({"psd", "--signal", "tone300", "--out", tone_out}) == 0);
  const auto tone = parse_csv(tone_out);
  CHECK(tone.headers.at("signal") == "tone300");
  CHECK(tone.headers.at("fs_hz") == "2000");
  CHECK(tone.headers.at("dft_size") == "4096");
  CHECK(tone.headers.at("c_mps") == "343");
  REQUIRE(tone.column_names == std::vector<std::string>{"freq_hz", "psd"});
  REQUIRE(tone.rows.size() == 2049);
  std::size_t nonzero = 0;
  for (const auto& row : tone.rows)
    if (row[1] != 0.0) ++nonzero;
  CHECK(nonzero == 1);

  // on a grid with a bin exactly at 300 Hz the low-pass PSD reads 0.5 there
  const auto lp_out = temp_path("psd_lpf.csv");
  REQUIRE(run_cli({"psd", "--signal", "lpf300", "--dft-size", "4000", "--out", lp_out}) == 0);
  const auto lp = parse_csv(lp_out);
  bool found = false;
  for (const auto& row : lp.rows) {
    if (row[0] == 300.0) {
      CHECK(row[1] == doctest::Approx(0.5).epsilon(1e-12));
      found = true;
    }
  }
  CHECK(found);

  // band-pass shape peaks inside (300, 500)
  const auto bpf_out = temp_path("psd_bpf.csv");
  REQUIRE(run_cli({"psd", "--signal", "bpf", "--out", bpf_out}) == 0);
  const auto bpf = parse_csv(bpf_out);
  double best_f = 0.0, best_v = -1.0;
  for (const auto& row : bpf.rows)
    if (row[1] > best_v) {
      best_v = row[1];
      best_f = row[0];
    }
  CHECK(best_f > 300.0);
  CHECK(best_f < 500.0);
}

TEST_CASE("cli corr: auto and cross anchors") {
  const auto auto_out = temp_path("corr_auto.csv");
  REQUIRE(run_cli({"corr", "--signal", "tone300", "--sweep-max", "0.6", "--out", auto_out}) == 0);
  const auto auto_csv = parse_csv(auto_out);
  REQUIRE(auto_csv.column_names == std::vector<std::string>{"delta_r_m", "rho"});
  CHECK(auto_csv.rows.front()[0] == 0.0);
  CHECK(auto_csv.rows.front()[1] == 1.0);

  // row nearest half the (bin-snapped) wavelength sits at the sinc zero
  const double half_lambda = 343.0 / (2.0 * 299.8046875);
  double best_gap = 1e9;
  double rho_at_zero = 1.0;
  for (const auto& row : auto_csv.rows) {
    if (std::abs(row[0] - half_lambda) < best_gap) {
      best_gap = std::abs(row[0] - half_lambda);
      rho_at_zero = row[1];
    }
  }
  CHECK(std::abs(rho_at_zero) < 0.005);

  const auto cross_out = temp_path("corr_cross.csv");
  REQUIRE(run_cli({"corr", "--signal", "lpf600", "--corr-mode", "cross", "--out", cross_out}) == 0);
  const auto cross_csv = parse_csv(cross_out);
  CHECK(cross_csv.headers.at("corr_mode") == "cross");
  CHECK(cross_csv.rows.front()[1] == -1.0);
  REQUIRE(cross_csv.rows.size() == 501);
}

TEST_CASE("cli zone1d: near width, far floor and plateau") {
  const auto near_out = temp_path("zone1d_near.csv");
  REQUIRE(run_cli({"zone1d", "--signal", "tone300", "--out", near_out}) == 0);
  const auto near_csv = parse_csv(near_out);
  REQUIRE(near_csv.column_names ==
          std::vector<std::string>{"delta_r_m", "epsilon", "attenuation_db"});
  const double width = std::stod(near_csv.headers.at("zone_width_m"));
  const double lambda = 343.0 / 300.0;
  CHECK(width / lambda == doctest::Approx(0.0878).epsilon(0.01));
  CHECK(near_csv.rows.front()[1] == 0.0);
  CHECK(near_csv.rows.front()[2] == -100.0); // dB floor at the exact null

  const auto far_out = temp_path("zone1d_far.csv");
  REQUIRE(run_cli({"zone1d", "--signal", "tone300", "--mode", "far", "--sweep-max", "3.0",
                   "--out", far_out}) == 0);
  const auto far_csv = parse_csv(far_out);
  CHECK(far_csv.headers.at("mode") == "far");
  CHECK(far_csv.headers.at("gain_ratio") == "3");
  CHECK(far_csv.rows.front()[2] == -100.0);
  CHECK(far_csv.rows.back()[2] == doctest::Approx(10.0 * std::log10(4.0)).epsilon(0.01));

  // a signal whose zone is far wider than the search range reports no crossing
  const auto none_out = temp_path("zone1d_none.csv");
  REQUIRE(run_cli({"zone1d", "--signal", "lp:2:1", "--out", none_out}) == 0);
  CHECK(parse_csv(none_out).headers.at("zone_width_m") == "no crossing");
}

TEST_CASE("cli zone2d: field and contour outputs") {
  const auto prefix = temp_path("zone2d_bpf");
  REQUIRE(run_cli({"zone2d", "--signal", "bpf", "--grid", "0.05,0.45,-0.2,0.2,0.005", "--out",
                   prefix}) == 0);

  const auto field = parse_csv(prefix + "_field.csv");
  REQUIRE(field.column_names == std::vector<std::string>{"x_m", "y_m", "epsilon"});
  CHECK(field.headers.at("cancellation_point") == "0.2,0");
  CHECK(field.headers.at("source") == "0,0");
  CHECK(field.rows.size() == 81 * 81); // nothing masked on the default window
  for (const auto& row : field.rows) CHECK(row[2] >= 0.0);

  const auto contour = parse_csv(prefix + "_contour.csv");
  REQUIRE(contour.column_names ==
          std::vector<std::string>{"polyline_id", "vertex_id", "x_m", "y_m"});
  CHECK(std::stoul(contour.headers.at("polylines")) >= 1);
  const double reach = std::stod(contour.headers.at("zone_extent_m"));
  CHECK(std::abs(reach - 0.0840957837708) < 1e-9); // regression fixture
  CHECK(std::stod(contour.headers.at("contour_max_diameter_m")) > reach);
  CHECK(contour.rows.size() >= 8);

  // every contour vertex lies inside the grid window
  for (const auto& row : contour.rows) {
    CHECK(row[2] >= 0.05);
    CHECK(row[2] <= 0.45);
    CHECK(row[3] >= -0.2);
    CHECK(row[3] <= 0.2);
  }
}

TEST_CASE("cli zone2d: tone300 contour regression") {
  const auto prefix = temp_path("zone2d_tone");
  REQUIRE(run_cli({"zone2d", "--signal", "tone300", "--grid", "0.05,0.45,-0.2,0.2,0.005", "--out",
                   prefix}) == 0);
  const auto contour = parse_csv(prefix + "_contour.csv");
  CHECK(contour.headers.at("polylines") == "1");
  // fixtures frozen from the first verified run; the crescent around the
  // r = 0.2 shell reaches one zone width from the cancellation point
  CHECK(std::abs(std::stod(contour.headers.at("zone_extent_m")) - 0.101084264604) < 1e-9);
  CHECK(std::abs(std::stod(contour.headers.at("contour_max_diameter_m")) - 0.198533566908) <
        1e-9);
  CHECK(std::abs(std::stod(contour.headers.at("contour_area_m2")) - 0.0128783177382) < 1e-9);
}

TEST_CASE("cli zone2d: empty contour is reported, not an error") {
  const auto prefix = temp_path("zone2d_empty");
  REQUIRE(run_cli({"zone2d", "--signal", "bpf", "--r0", "0.2001,0.0003", "--grid",
                   "0.1,0.3,-0.1,0.1,0.005", "--threshold-db", "-95", "--out", prefix}) == 0);
  const auto contour = parse_csv(prefix + "_contour.csv");
  CHECK(contour.headers.at("polylines") == "0");
  CHECK(contour.rows.empty());
}

TEST_CASE("cli oracle: writes the comparison and enforces the tolerance") {
  const auto out = temp_path("oracle.csv");
  REQUIRE(run_cli({"oracle", "--signal", "tone300", "--n-directions", "20000", "--tolerance",
                   "0.05", "--sweep-max", "0.3", "--sweep-step", "0.1", "--out", out}) == 0);
  const auto csv = parse_csv(out);
  REQUIRE(csv.column_names ==
          std::vector<std::string>{"delta_r_m", "rho_analytic", "rho_oracle", "abs_err"});
  REQUIRE(csv.rows.size() == 4);
  CHECK(csv.rows.front()[3] == 0.0); // exact at zero separation
  for (const auto& row : csv.rows)   // columns round-trip at 12 significant digits
    CHECK(std::abs(row[1] - row[2]) == doctest::Approx(row[3]).epsilon(1e-9));

  // an unreachable tolerance fails with the dedicated exit code
  CHECK(run_cli({"oracle", "--signal", "lpf600", "--n-directions", "500", "--tolerance", "1e-9",
                 "--sweep-max", "0.3", "--sweep-step", "0.1", "--out",
                 temp_path("oracle_fail.csv")}) == 2);
}

TEST_CASE("cli: byte-identical reruns") {
  const auto out_a = temp_path("det_a.csv");
  const auto out_b = temp_path("det_b.csv");
  for (const auto& out : {out_a, out_b})
    REQUIRE(run_cli({"oracle", "--signal", "bpf", "--n-directions", "5000", "--seed", "99",
                     "--sweep-max", "0.2", "--sweep-step", "0.05", "--out", out}) == 0);
  CHECK(read_bytes(out_a) == read_bytes(out_b));

  const auto z_a = temp_path("det_z_a");
  const auto z_b = temp_path("det_z_b");
  for (const auto& prefix : {z_a, z_b})
    REQUIRE(run_cli({"zone2d", "--signal", "tone300", "--grid", "0.1,0.3,-0.1,0.1,0.01", "--out",
                     prefix}) == 0);
  CHECK(read_bytes(z_a + "_contour.csv") == read_bytes(z_b + "_contour.csv"));
  CHECK(read_bytes(z_a + "_field.csv") == read_bytes(z_b + "_field.csv"));
}

TEST_CASE("cli: config file supplies defaults, flags override") {
  const auto config = temp_path("corr.conf");
  {
    std::ofstream out(config);
    out << "# correlation run\n";
    out << "signal = lpf600\n";
    out << "sweep-max = 0.3\n";
    out << "sweep-step = 0.1\n";
  }
  const auto out_file = temp_path("corr_conf.csv");
  REQUIRE(run_cli({"corr", "--config", config, "--out", out_file}) == 0);
  auto csv = parse_csv(out_file);
  CHECK(csv.headers.at("signal") == "lpf600");
  CHECK(csv.headers.at("sweep_max_m") == "0.3");
  REQUIRE(csv.rows.size() == 4);

  REQUIRE(run_cli({"corr", "--config", config, "--signal", "tone300", "--out", out_file}) == 0);
  csv = parse_csv(out_file);
  CHECK(csv.headers.at("signal") == "tone300");
  CHECK(csv.headers.at("sweep_max_m") == "0.3");
}

TEST_CASE("cli: configuration errors exit with code 1") {
  CHECK(run_cli({"psd", "--signal", "nosuchsignal", "--out", temp_path("x.csv")}) == 1);
  CHECK(run_cli({"psd", "--signal", "tone:1500", "--out", temp_path("x.csv")}) == 1);
  CHECK(run_cli({"zone1d", "--mode", "sideways", "--out", temp_path("x.csv")}) == 1);
  CHECK(run_cli({"zone1d", "--threshold-db", "3", "--out", temp_path("x.csv")}) == 1);
  CHECK(run_cli({"zone2d", "--mode", "far", "--out", temp_path("x")}) == 1);
  CHECK(run_cli({"zone2d", "--grid", "1,2,3", "--out", temp_path("x")}) == 1);
  CHECK(run_cli({"corr", "--corr-mode", "upside"}) == 1);
  CHECK(run_cli({"corr", "--no-such-flag", "1"}) == 1);
  CHECK(run_cli({}) == 1);
  CHECK(run_cli({"corr", "--config", temp_path("missing.conf")}) == 1);

  const auto bad_conf = temp_path("bad.conf");
  {
    std::ofstream out(bad_conf);
    out << "unknown-key = 1\n";
  }
  CHECK(run_cli({"corr", "--config", bad_conf}) == 1);
}

TEST_CASE("cli: inline signal grammar") {
  const auto out = temp_path("inline.csv");
  REQUIRE(run_cli({"psd", "--signal", "lp:8:400+hp:2:600", "--out", out}) == 0);
  const auto inline_csv = parse_csv(out);
  REQUIRE(run_cli({"psd", "--signal", "bpf", "--out", out}) == 0);
  const auto preset_csv = parse_csv(out);
  REQUIRE(inline_csv.rows.size() == preset_csv.rows.size());
  for (std::size_t r = 0; r < inline_csv.rows.size(); ++r)
    CHECK(inline_csv.rows[r][1] == preset_csv.rows[r][1]);

  REQUIRE(run_cli({"psd", "--signal", "tone:250", "--out", out}) == 0);
  std::size_t nonzero = 0;
  for (const auto& row : parse_csv(out).rows)
    if (row[1] != 0.0) ++nonzero;
  CHECK(nonzero == 1);
}
