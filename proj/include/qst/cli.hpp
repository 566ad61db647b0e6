#ifndef QST_CLI_HPP
#define QST_CLI_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "qst/model.hpp"

namespace qst::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kOk = 0,
  kValidationError = 1,
  kComputationError = 2,
  kIoError = 3,
};

/// Configuration or argument problem; maps to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File system problem; maps to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Run configuration: physical parameters plus run controls. Defaults
/// reproduce the N = 48 reference device (l = 19, J0 = 0.9, mu0 = 20,
/// tau = 480).
struct RunConfig {
  int n_chain = 48;
  int attach_left = 0;  // 0 = derive from distance
  int distance = 12;
  double hop_chain = 1.0;
  double hop_endpoint = 0.9;
  double peak_voltage = 20.0;
  double total_time = 480.0;
  double pulse_width_factor = 8.0;

  long n_steps = 0;  // 0 = automatic default_step_count
  int n_samples = 1001;
  int n_store = 501;
  double f_target = 0.995;
  double tau_cap = 1e5;
  bool fast_mode = false;
  std::vector<double> j0_grid;     // empty = per-kind default
  std::vector<int> distance_grid;  // empty = per-kind default
  bool j0_grid_given = false;
  bool distance_grid_given = false;
  std::string kind;  // sweep kind
  std::string output;  // empty = <command>.<format>
  std::string format = "csv";
  bool emit_plot_script = false;

  /// SystemParams from the physical fields. Throws ValidationError.
  SystemParams make_params() const;
};

/// Parses a config JSON document; unknown keys and type mismatches raise
/// ValidationError with the offending field named.
RunConfig parse_config_json(const std::string& text);

/// Entry point used by the qstbus binary and by in-process tests.
/// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace qst::cli

#endif
