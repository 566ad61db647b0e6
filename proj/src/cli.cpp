#include "qst/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "qst/adiabatic.hpp"
#include "qst/dynamics.hpp"
#include "qst/parallel.hpp"
#include "qst/spectral.hpp"
#include "qst/sweep.hpp"

namespace qst::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal representation; locale independent.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // Scalar results appended after the rows (fidelity, fit parameters, ...).
  std::vector<std::pair<std::string, double>> footers;
};

struct CommandResult {
  Table table;
  int exit_code = kOk;
};

std::string to_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_double(row[c]);
    }
    out << '\n';
  }
  for (const auto& [key, value] : table.footers) {
    out << "# " << key << " = " << format_double(value) << '\n';
  }
  return out.str();
}

ordered_json params_json(const RunConfig& cfg, const SystemParams& p) {
  ordered_json j;
  j["n_chain"] = p.n_chain;
  j["attach_left"] = p.attach_left;
  j["distance"] = p.distance();
  j["hop_chain"] = p.hop_chain;
  j["hop_endpoint"] = p.hop_endpoint;
  j["peak_voltage"] = p.peak_voltage;
  j["total_time"] = p.total_time;
  j["pulse_width_factor"] = p.pulse_width_factor;
  j["format"] = cfg.format;
  return j;
}

std::string to_json_text(const std::string& command,
                         const ordered_json& params, const Table& table) {
  ordered_json j;
  j["command"] = command;
  j["params"] = params;
  j["columns"] = table.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json r = ordered_json::array();
    for (double v : row) {
      if (std::isnan(v)) {
        r.push_back(nullptr);
      } else {
        r.push_back(v);
      }
    }
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  for (const auto& [key, value] : table.footers) {
    j[key] = value;
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

void parse_json_into(const ordered_json& doc, RunConfig& cfg) {
  bool saw_attach_left = false;
  bool saw_distance = false;
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "n_chain") {
        cfg.n_chain = value.get<int>();
      } else if (key == "attach_left") {
        cfg.attach_left = value.get<int>();
        saw_attach_left = true;
      } else if (key == "distance") {
        cfg.distance = value.get<int>();
        saw_distance = true;
      } else if (key == "hop_chain") {
        cfg.hop_chain = value.get<double>();
      } else if (key == "hop_endpoint") {
        cfg.hop_endpoint = value.get<double>();
      } else if (key == "peak_voltage") {
        cfg.peak_voltage = value.get<double>();
      } else if (key == "total_time") {
        cfg.total_time = value.get<double>();
      } else if (key == "pulse_width_factor") {
        cfg.pulse_width_factor = value.get<double>();
      } else if (key == "n_steps") {
        cfg.n_steps = value.get<long>();
      } else if (key == "n_samples") {
        cfg.n_samples = value.get<int>();
      } else if (key == "n_store") {
        cfg.n_store = value.get<int>();
      } else if (key == "f_target") {
        cfg.f_target = value.get<double>();
      } else if (key == "tau_cap") {
        cfg.tau_cap = value.get<double>();
      } else if (key == "fast_mode") {
        cfg.fast_mode = value.get<bool>();
      } else if (key == "j0_grid") {
        cfg.j0_grid = value.get<std::vector<double>>();
        cfg.j0_grid_given = true;
      } else if (key == "distance_grid") {
        cfg.distance_grid = value.get<std::vector<int>>();
        cfg.distance_grid_given = true;
      } else if (key == "kind") {
        cfg.kind = value.get<std::string>();
      } else if (key == "output") {
        cfg.output = value.get<std::string>();
      } else if (key == "format") {
        cfg.format = value.get<std::string>();
      } else {
        throw ValidationError("config: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception&) {
      throw ValidationError("config: field '" + key + "' has the wrong type");
    }
  }
  if (saw_attach_left && saw_distance) {
    throw ValidationError(
        "config: 'attach_left' and 'distance' are mutually exclusive");
  }
  if (saw_distance) {
    cfg.attach_left = 0;
  }
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") +
                          e.what());
  }
  if (!doc.is_object()) {
    throw ValidationError("config must be a JSON object");
  }
  RunConfig cfg;
  parse_json_into(doc, cfg);
  return cfg;
}

SystemParams RunConfig::make_params() const {
  if (attach_left > 0) {
    return SystemParams(n_chain, attach_left, hop_chain, hop_endpoint,
                        peak_voltage, total_time, pulse_width_factor);
  }
  return SystemParams::for_distance(n_chain, distance, hop_chain, hop_endpoint,
                                    peak_voltage, total_time,
                                    pulse_width_factor);
}

namespace {

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

CommandResult cmd_spectrum(const RunConfig& cfg) {
  const SystemParams params = cfg.make_params();
  if (cfg.n_samples < 3) {
    throw ValidationError("spectrum: n_samples must be >= 3");
  }
  const int n = cfg.n_samples;
  Table table;
  table.columns = {"t", "eps_ground", "eps_excited", "gap"};
  table.rows.resize(n);
  parallel_for_index(n, [&](int i) {
    const double t = params.total_time * i / (n - 1);
    const Spectrum s = eigendecompose(build_hamiltonian(params, t));
    table.rows[i] = {t, s.eigenvalues(0), s.eigenvalues(1),
                     s.eigenvalues(1) - s.eigenvalues(0)};
  });
  const GapAnalysis gap = gap_analysis(params, cfg.n_samples);
  table.footers.emplace_back("min_gap", gap.min_gap);
  table.footers.emplace_back("t_at_min_gap", gap.t_at_min);
  return {std::move(table), kOk};
}

CommandResult cmd_propagate(const RunConfig& cfg) {
  const SystemParams params = cfg.make_params();
  long n_steps = cfg.n_steps > 0 ? cfg.n_steps : default_step_count(params);
  if (cfg.fast_mode) {
    n_steps = std::max(2L, n_steps / 4);
  }
  if (cfg.n_store < 2 || n_steps < cfg.n_store) {
    throw ValidationError(
        "propagate: needs n_steps >= n_store >= 2 (resolved n_steps " +
        std::to_string(n_steps) + ", n_store " + std::to_string(cfg.n_store) +
        ")");
  }
  const Trajectory traj = run_transfer(params, n_steps, cfg.n_store);
  Table table;
  table.columns = {"t", "p_a", "p_chain", "p_b"};
  table.rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    table.rows.push_back({traj.times[i], traj.populations[i].dot_a,
                          traj.populations[i].chain,
                          traj.populations[i].dot_b});
  }
  table.footers.emplace_back("max_norm_drift", traj.max_norm_drift);
  table.footers.emplace_back("fidelity", traj.fidelity);
  return {std::move(table), kOk};
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = lo + step * i;
    if (v > hi + 1e-12) {
      break;
    }
    grid.push_back(v);
  }
  return grid;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  const SystemParams base = cfg.make_params();
  const StepMode mode = cfg.fast_mode ? StepMode::fast : StepMode::standard;
  if (cfg.kind.empty()) {
    throw ValidationError(
        "sweep: missing kind (gap-distance | gap-coupling | "
        "fidelity-coupling | adiabaticity-coupling)");
  }
  if (cfg.j0_grid_given && cfg.j0_grid.empty()) {
    throw ValidationError("sweep: j0_grid is empty");
  }
  if (cfg.distance_grid_given && cfg.distance_grid.empty()) {
    throw ValidationError("sweep: distance_grid is empty");
  }

  Table table;
  if (cfg.kind == "gap-distance") {
    const std::vector<double> j0s =
        cfg.j0_grid_given ? cfg.j0_grid : std::vector<double>{0.5, 0.7};
    std::vector<int> ds = cfg.distance_grid;
    if (!cfg.distance_grid_given) {
      for (int d = 8; d <= 24; d += 2) ds.push_back(d);
    }
    table.columns = {"j0", "distance", "min_gap"};
    for (double j0 : j0s) {
      const auto records =
          gap_vs_distance(with_coupling(base, j0), ds, kDefaultGapSamples);
      for (const auto& rec : records) {
        table.rows.push_back({j0, rec.inputs.at("distance"), rec.value});
      }
    }
  } else if (cfg.kind == "gap-coupling") {
    const std::vector<double> j0s =
        cfg.j0_grid_given ? cfg.j0_grid : uniform_grid(0.1, 1.5, 0.1);
    const std::vector<int> ds = cfg.distance_grid_given
                                    ? cfg.distance_grid
                                    : std::vector<int>{8, 16, 24};
    table.columns = {"distance", "j0", "min_gap"};
    for (int d : ds) {
      const auto records = gap_vs_coupling(base, j0s, d, kDefaultGapSamples);
      for (std::size_t i = 0; i < records.size(); ++i) {
        table.rows.push_back(
            {static_cast<double>(d), j0s[i], records[i].value});
      }
    }
  } else if (cfg.kind == "fidelity-coupling") {
    const std::vector<double> j0s =
        cfg.j0_grid_given ? cfg.j0_grid : uniform_grid(0.5, 1.3, 0.05);
    table.columns = {"distance", "tau", "j0", "fidelity"};
    const auto records = fidelity_vs_coupling(base, j0s, base.distance(),
                                              base.total_time, mode);
    for (std::size_t i = 0; i < records.size(); ++i) {
      table.rows.push_back({static_cast<double>(base.distance()),
                            base.total_time, j0s[i], records[i].value});
    }
  } else if (cfg.kind == "adiabaticity-coupling") {
    const std::vector<double> j0s =
        cfg.j0_grid_given ? cfg.j0_grid : uniform_grid(0.3, 1.2, 0.1);
    const std::vector<int> ds = cfg.distance_grid_given
                                    ? cfg.distance_grid
                                    : std::vector<int>{10, 16, 20};
    table.columns = {"distance", "j0", "max_adiabaticity",
                     "max_adiabaticity_tau"};
    // Validate every distance before computing anything.
    std::vector<SystemParams> points;
    for (int d : ds) {
      const SystemParams at_d = with_distance(base, d);
      for (double j0 : j0s) {
        points.push_back(with_coupling(at_d, j0));
      }
    }
    const int curve_samples = std::max(cfg.n_samples, 33);
    table.rows.resize(points.size());
    parallel_for_index(static_cast<int>(points.size()), [&](int i) {
      const AdiabaticityCurve curve =
          adiabaticity_curve(points[i], curve_samples);
      table.rows[i] = {static_cast<double>(points[i].distance()),
                       points[i].hop_endpoint, curve.max_value,
                       curve.max_value_times_tau};
    });
  } else {
    throw ValidationError("sweep: unknown kind '" + cfg.kind + "'");
  }
  return {std::move(table), kOk};
}

CommandResult cmd_optimize(const RunConfig& cfg) {
  const SystemParams base = cfg.make_params();
  const StepMode mode = cfg.fast_mode ? StepMode::fast : StepMode::standard;
  if (cfg.distance_grid_given && cfg.distance_grid.empty()) {
    throw ValidationError("optimize: distance_grid is empty");
  }
  std::vector<int> ds = cfg.distance_grid;
  if (!cfg.distance_grid_given) {
    // Admissible distances in [7, 23] for this chain length.
    for (int d = 7; d <= 23; ++d) {
      if ((base.n_chain + 2 - d) % 2 == 0 && (base.n_chain + 2 - d) / 2 >= 1) {
        ds.push_back(d);
      }
    }
  }
  for (int d : ds) {
    (void)with_distance(base, d);  // reject inadmissible values up front
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table table;
  table.columns = {"distance", "j0_opt", "tau_min", "fidelity", "status"};
  table.rows.resize(ds.size());
  std::vector<int> failed(ds.size(), 0);
  parallel_for_index(static_cast<int>(ds.size()), [&](int i) {
    try {
      const TimeOptimum opt =
          minimum_transfer_time(base, ds[i], cfg.f_target, cfg.tau_cap, mode);
      table.rows[i] = {static_cast<double>(ds[i]), opt.j0_opt, opt.tau_min,
                       opt.fidelity, 0.0};
    } catch (const std::runtime_error&) {
      table.rows[i] = {static_cast<double>(ds[i]), nan, nan, nan, 1.0};
      failed[i] = 1;
    }
  });

  std::vector<std::pair<double, double>> fit_points;
  for (const auto& row : table.rows) {
    if (row[4] == 0.0) {
      fit_points.emplace_back(row[0], row[2]);
    }
  }
  if (fit_points.size() >= 3) {
    const FitResult fit = linear_fit(fit_points);
    table.footers.emplace_back("fit_slope", fit.slope);
    table.footers.emplace_back("fit_intercept", fit.intercept);
    table.footers.emplace_back("fit_r_squared", fit.r_squared);
  }
  const bool any_failed =
      std::any_of(failed.begin(), failed.end(), [](int f) { return f != 0; });
  return {std::move(table), any_failed ? kComputationError : kOk};
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open output file '" + path + "'");
  }
  out << content;
  if (!out) {
    throw IoError("failed while writing '" + path + "'");
  }
}

std::string plot_script(const std::string& command, const RunConfig& cfg,
                        const std::string& data_path) {
  std::ostringstream s;
  s << "# gnuplot script generated by qstbus " << command << "\n";
  s << "set datafile separator ','\n";
  if (cfg.format == "json") {
    s << "# note: data was written as JSON; re-run with --format csv to plot\n";
  }
  if (command == "spectrum") {
    s << "set xlabel 't (1/J)'\nset ylabel 'energy (J)'\n";
    s << "plot '" << data_path
      << "' skip 1 using 1:2 with lines title 'ground',"
      << " '' skip 1 using 1:3 with lines title 'first excited'\n";
  } else if (command == "propagate") {
    s << "set xlabel 't (1/J)'\nset ylabel 'population'\n";
    s << "plot '" << data_path << "' skip 1 using 1:2 with lines title 'P_A',"
      << " '' skip 1 using 1:3 with lines title 'P_M',"
      << " '' skip 1 using 1:4 with lines title 'P_B'\n";
  } else if (command == "sweep" && cfg.kind == "gap-distance") {
    s << "set logscale y\nset xlabel 'D'\nset ylabel 'min gap (J)'\n";
    s << "plot '" << data_path
      << "' skip 1 using 2:3 with points title 'gap'\n";
  } else {
    s << "set xlabel '" << (command == "optimize" ? "D" : "J0") << "'\n";
    s << "plot '" << data_path << "' skip 1 using 1:2 with linespoints\n";
  }
  return s.str();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{
      "qstbus: adiabatic state transfer through a gated tight-binding chain"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_path;
  std::string format;
  std::string kind;
  int n_chain = 0;
  int distance = 0;
  double j0 = 0.0;
  double mu0 = 0.0;
  double tau = 0.0;
  long steps = 0;
  double f_target = 0.0;
  bool emit_plot = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--output", output_path, "output file path");
    sub->add_option("--format", format, "output format (csv | json)");
    sub->add_option("--n", n_chain, "chain length N");
    sub->add_option("--distance", distance, "transfer distance D");
    sub->add_option("--j0", j0, "endpoint coupling J0");
    sub->add_option("--mu0", mu0, "pulse peak voltage mu0");
    sub->add_option("--tau", tau, "protocol duration tau");
    sub->add_option("--steps", steps, "number of integration steps");
    sub->add_option("--f-target", f_target, "fidelity target");
    sub->add_flag("--emit-plot-script", emit_plot,
                  "write a gnuplot script next to the data");
  };
  CLI::App* sub_spectrum = app.add_subcommand(
      "spectrum",
      "instantaneous lowest eigenvalues and gap over the protocol");
  CLI::App* sub_propagate = app.add_subcommand(
      "propagate", "integrate the transfer protocol and report populations");
  CLI::App* sub_sweep = app.add_subcommand(
      "sweep", "parameter sweeps (gap, fidelity, adiabaticity)");
  CLI::App* sub_optimize = app.add_subcommand(
      "optimize", "per-distance optimal coupling and minimum transfer time");
  for (CLI::App* sub : {sub_spectrum, sub_propagate, sub_sweep, sub_optimize}) {
    add_common(sub);
  }
  sub_sweep->add_option("--kind", kind,
                        "gap-distance | gap-coupling | fidelity-coupling | "
                        "adiabaticity-coupling");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config_file(config_path);
    }
    CLI::App* active = app.get_subcommands().front();
    const std::string command = active->get_name();

    // Flags override config fields.
    if (active->count("--output")) cfg.output = output_path;
    if (active->count("--format")) cfg.format = format;
    if (active->count("--n")) cfg.n_chain = n_chain;
    if (active->count("--distance")) {
      cfg.distance = distance;
      cfg.attach_left = 0;
    }
    if (active->count("--j0")) cfg.hop_endpoint = j0;
    if (active->count("--mu0")) cfg.peak_voltage = mu0;
    if (active->count("--tau")) cfg.total_time = tau;
    if (active->count("--steps")) cfg.n_steps = steps;
    if (active->count("--f-target")) cfg.f_target = f_target;
    if (emit_plot) cfg.emit_plot_script = true;
    if (command == "sweep" && active->count("--kind")) cfg.kind = kind;
    if (cfg.format != "csv" && cfg.format != "json") {
      throw ValidationError("format must be 'csv' or 'json', got '" +
                            cfg.format + "'");
    }

    CommandResult result;
    if (command == "spectrum") {
      result = cmd_spectrum(cfg);
    } else if (command == "propagate") {
      result = cmd_propagate(cfg);
    } else if (command == "sweep") {
      result = cmd_sweep(cfg);
    } else {
      result = cmd_optimize(cfg);
    }

    const std::string path =
        cfg.output.empty() ? command + "." + cfg.format : cfg.output;
    const std::string content =
        cfg.format == "csv"
            ? to_csv(result.table)
            : to_json_text(command, params_json(cfg, cfg.make_params()),
                           result.table);
    write_file(path, content);
    if (cfg.emit_plot_script) {
      write_file(path + ".gp", plot_script(command, cfg, path));
    }

    std::cout << command << ": wrote " << result.table.rows.size()
              << " rows to " << path << "\n";
    for (const auto& [key, value] : result.table.footers) {
      std::cout << key << " = " << format_double(value) << "\n";
    }
    return result.exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputationError;
  }
}

}  // namespace qst::cli
