#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qst/cli.hpp"

namespace fs = std::filesystem;
using qst::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qstbus_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  static inline int counter = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> row;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    row.push_back(std::stod(cell));
  }
  return row;
}

// small fast configuration shared by most tests
std::string small_config(const TempDir& dir, const std::string& extra = "") {
  const std::string path = dir.file("config.json");
  spit(path, std::string("{\n"
                         "  \"n_chain\": 16,\n"
                         "  \"distance\": 6,\n"
                         "  \"hop_endpoint\": 0.8,\n"
                         "  \"peak_voltage\": 12.0,\n"
                         "  \"total_time\": 60.0,\n"
                         "  \"n_samples\": 41,\n"
                         "  \"n_store\": 21\n") +
            extra + "}\n");
  return path;
}

}  // namespace

TEST_CASE("cli: spectrum writes the requested grid with its minimum at mid-protocol") {
  TempDir dir;
  const std::string out = dir.file("spec.csv");
  const int code = run({"spectrum", "--config", small_config(dir), "--output",
                        out});
  CHECK(code == 0);

  const auto lines = lines_of(slurp(out));
  REQUIRE(lines.size() >= 42);
  CHECK(lines[0] == "t,eps_ground,eps_excited,gap");
  int data_rows = 0;
  int imin = 0;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("#", 0) == 0) {
      continue;
    }
    rows.push_back(parse_csv_row(lines[i]));
    ++data_rows;
    if (rows.back()[3] < rows[imin][3]) {
      imin = data_rows - 1;
    }
  }
  CHECK(data_rows == 41);
  // the avoided crossing sits in the central part of the protocol and the
  // gap curve is mirror symmetric about tau/2
  CHECK(rows[imin][0] >= 0.3 * 60.0);
  CHECK(rows[imin][0] <= 0.7 * 60.0);
  for (int i = 0; i < 41; ++i) {
    CHECK(std::abs(rows[i][3] - rows[40 - i][3]) <= 1e-9);
    CHECK(rows[i][3] == doctest::Approx(rows[i][2] - rows[i][1]).epsilon(1e-12));
  }
}

TEST_CASE("cli: csv and json carry identical numbers") {
  TempDir dir;
  const std::string csv_path = dir.file("s.csv");
  const std::string json_path = dir.file("s.json");
  REQUIRE(run({"spectrum", "--config", small_config(dir), "--output", csv_path,
               "--format", "csv"}) == 0);
  REQUIRE(run({"spectrum", "--config", small_config(dir), "--output",
               json_path, "--format", "json"}) == 0);

  const auto doc = nlohmann::json::parse(slurp(json_path));
  CHECK(doc["command"] == "spectrum");
  const auto& jrows = doc["rows"];

  const auto lines = lines_of(slurp(csv_path));
  std::size_t jrow = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("#", 0) == 0) {
      continue;
    }
    const auto cells = parse_csv_row(lines[i]);
    REQUIRE(jrow < jrows.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      // full-precision equality after round-trip
      CHECK(cells[c] == jrows[jrow][c].get<double>());
    }
    ++jrow;
  }
  CHECK(jrow == jrows.size());
}

TEST_CASE("cli: identical configs produce byte-identical outputs") {
  TempDir dir;
  const std::string a = dir.file("a.csv");
  const std::string b = dir.file("b.csv");
  REQUIRE(run({"spectrum", "--config", small_config(dir), "--output", a}) == 0);
  REQUIRE(run({"spectrum", "--config", small_config(dir), "--output", b}) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("cli: missing config file exits 3 without partial output") {
  TempDir dir;
  const std::string out = dir.file("never.csv");
  const int code =
      run({"spectrum", "--config", dir.file("absent.json"), "--output", out});
  CHECK(code == 3);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("cli: config validation failures exit 1") {
  TempDir dir;
  const std::string bad_key = dir.file("bad1.json");
  spit(bad_key, "{\"peak_volts\": 20}");
  CHECK(run({"spectrum", "--config", bad_key}) == 1);

  const std::string bad_type = dir.file("bad2.json");
  spit(bad_type, "{\"n_chain\": \"many\"}");
  CHECK(run({"spectrum", "--config", bad_type}) == 1);

  const std::string both = dir.file("bad3.json");
  spit(both, "{\"attach_left\": 3, \"distance\": 6}");
  CHECK(run({"spectrum", "--config", both}) == 1);

  const std::string not_json = dir.file("bad4.json");
  spit(not_json, "{nope");
  CHECK(run({"spectrum", "--config", not_json}) == 1);

  // inadmissible distance for the chain parity
  CHECK(run({"spectrum", "--config", small_config(dir), "--distance", "7"}) ==
        1);
  CHECK(run({"spectrum", "--config", small_config(dir), "--format", "tsv"}) ==
        1);
}

TEST_CASE("cli: propagate row count and footers") {
  TempDir dir;
  const std::string out = dir.file("prop.csv");
  REQUIRE(run({"propagate", "--config", small_config(dir), "--output", out}) ==
          0);
  const auto lines = lines_of(slurp(out));
  REQUIRE(lines.size() == 1 + 21 + 2);  // header + n_store rows + two footers
  CHECK(lines[0] == "t,p_a,p_chain,p_b");
  CHECK(lines.back().rfind("# fidelity = ", 0) == 0);

  int data_rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("#", 0) != 0) {
      ++data_rows;
    }
  }
  CHECK(data_rows == 21);
}

TEST_CASE("cli: propagate with a decoupled sender keeps P_A at one") {
  TempDir dir;
  const std::string out = dir.file("frozen.csv");
  REQUIRE(run({"propagate", "--config", small_config(dir), "--j0", "0",
               "--output", out}) == 0);
  const auto lines = lines_of(slurp(out));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].rfind("#", 0) == 0) {
      continue;
    }
    const auto row = parse_csv_row(lines[i]);
    CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("cli: propagate reference run reports its fidelity in the footer") {
  TempDir dir;
  const std::string out = dir.file("anchor.csv");
  REQUIRE(run({"propagate", "--j0", "0.89", "--output", out}) == 0);
  const std::string text = slurp(out);
  const auto lines = lines_of(text);
  const std::string last = lines.back();
  REQUIRE(last.rfind("# fidelity = ", 0) == 0);
  CHECK(std::stod(last.substr(13)) > 0.99);
}

TEST_CASE("cli: adiabaticity sweep emits maxima per grid point") {
  TempDir dir;
  const std::string cfg = small_config(
      dir, ",  \"j0_grid\": [0.6, 0.9],\n  \"distance_grid\": [6]\n");
  const std::string out = dir.file("adia.csv");
  REQUIRE(run({"sweep", "--kind", "adiabaticity-coupling", "--config", cfg,
               "--output", out}) == 0);
  const auto lines = lines_of(slurp(out));
  CHECK(lines[0] == "distance,j0,max_adiabaticity,max_adiabaticity_tau");
  REQUIRE(lines.size() == 3);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto row = parse_csv_row(lines[i]);
    CHECK(row[2] > 0.0);
    CHECK(row[3] == doctest::Approx(row[2] * 60.0).epsilon(1e-12));
  }
}

TEST_CASE("cli: sweep validates grids before computing") {
  TempDir dir;
  const std::string cfg = small_config(dir, ",  \"j0_grid\": []\n");
  const std::string out = dir.file("sweep.csv");
  CHECK(run({"sweep", "--kind", "fidelity-coupling", "--config", cfg,
             "--output", out}) == 1);
  CHECK_FALSE(fs::exists(out));

  CHECK(run({"sweep", "--kind", "bogus", "--config", small_config(dir)}) == 1);
  CHECK(run({"sweep", "--config", small_config(dir)}) == 1);  // missing kind
}

TEST_CASE("cli: gap-distance sweep emits one row per series point") {
  TempDir dir;
  const std::string cfg = small_config(
      dir, ",  \"j0_grid\": [0.5, 0.7],\n  \"distance_grid\": [4, 6, 8]\n");
  const std::string out = dir.file("gd.csv");
  REQUIRE(run({"sweep", "--kind", "gap-distance", "--config", cfg, "--output",
               out, "--emit-plot-script"}) == 0);
  const auto lines = lines_of(slurp(out));
  CHECK(lines[0] == "j0,distance,min_gap");
  CHECK(lines.size() == 1 + 6);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(parse_csv_row(lines[i])[2] > 0.0);  // log-plottable
  }
  CHECK(fs::exists(out + ".gp"));
}

TEST_CASE("cli: optimize single distance emits one row and no fit block") {
  TempDir dir;
  const std::string cfg = small_config(
      dir, ",  \"distance_grid\": [6],\n  \"f_target\": 0.9\n");
  const std::string out = dir.file("opt.csv");
  REQUIRE(run({"optimize", "--config", cfg, "--output", out}) == 0);
  const auto lines = lines_of(slurp(out));
  CHECK(lines[0] == "distance,j0_opt,tau_min,fidelity,status");
  REQUIRE(lines.size() == 2);  // no fit footer for a single row
  const auto row = parse_csv_row(lines[1]);
  CHECK(row[0] == 6.0);
  CHECK(row[3] >= 0.9);
  CHECK(row[4] == 0.0);
}

TEST_CASE("cli: unreachable fidelity target marks the row and exits 2") {
  TempDir dir;
  const std::string cfg = small_config(
      dir,
      ",  \"distance_grid\": [6],\n  \"f_target\": 0.99999,\n"
      "  \"tau_cap\": 100.0\n");
  const std::string out = dir.file("opt_fail.csv");
  CHECK(run({"optimize", "--config", cfg, "--output", out}) == 2);
  const auto lines = lines_of(slurp(out));
  REQUIRE(lines.size() == 2);
  CHECK(lines[1].find("nan") != std::string::npos);
  CHECK(lines[1].back() == '1');  // status column marks the failure
}

TEST_CASE("cli: flags override config fields") {
  TempDir dir;
  const std::string out = dir.file("ovr.json");
  REQUIRE(run({"spectrum", "--config", small_config(dir), "--tau", "80",
               "--format", "json", "--output", out}) == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["params"]["total_time"].get<double>() == 80.0);
  CHECK(doc["params"]["distance"].get<int>() == 6);
}

TEST_CASE("cli: help and argument errors") {
  CHECK(run({"--help"}) == 0);
  CHECK(run({"frobnicate"}) == 1);
  CHECK(run({}) == 1);
  CHECK(run({"spectrum", "--no-such-flag"}) == 1);
}
