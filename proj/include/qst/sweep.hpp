#ifndef QST_SWEEP_HPP
#define QST_SWEEP_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qst/dynamics.hpp"
#include "qst/model.hpp"

namespace qst {

/// One (parameter point -> observable) row of a sweep or optimization run.
/// inputs carries the full parameter context needed to reproduce the value.
struct SweepRecord {
  std::map<std::string, double> inputs;
  std::string observable;
  double value;
};

/// Ordinary least-squares line fit.
struct FitResult {
  double slope;
  double intercept;
  double r_squared;  // in [0, 1]; reported as 1 for an exact fit with
                     // zero-variance y (constant data)
};

/// Step-count policy for propagation inside sweeps. Fast mode uses 4x
/// coarser steps; diagnostics only, excluded from acceptance-grade runs.
enum class StepMode { standard, fast };

/// Result of the coupling-strength optimization at fixed distance and time.
struct CouplingOptimum {
  double j0_opt;
  double fidelity;
  bool used_grid_fallback;  // golden-section sanity check failed; value is a
                            // fine-grid maximum instead
};

/// Result of the minimum-transfer-time search at a fidelity target.
struct TimeOptimum {
  double tau_min;
  double j0_opt;
  double fidelity;
};

/// Default sample count for gap curves inside sweeps.
inline constexpr int kDefaultGapSamples = 101;

/// Rebuilds params with a new transfer distance (throws for inadmissible D,
/// naming the value), coupling, or protocol time.
SystemParams with_distance(const SystemParams& base, int distance);
SystemParams with_coupling(const SystemParams& base, double hop_endpoint);
SystemParams with_time(const SystemParams& base, double total_time);

/// Minimum gap per transfer distance at fixed coupling.
std::vector<SweepRecord> gap_vs_distance(const SystemParams& base,
                                         const std::vector<int>& distances,
                                         int n_gap_samples = kDefaultGapSamples);

/// Minimum gap per coupling at fixed distance.
std::vector<SweepRecord> gap_vs_coupling(const SystemParams& base,
                                         const std::vector<double>& couplings,
                                         int distance,
                                         int n_gap_samples = kDefaultGapSamples);

/// Transfer fidelity per coupling at fixed distance and protocol time.
std::vector<SweepRecord> fidelity_vs_coupling(
    const SystemParams& base, const std::vector<double>& couplings,
    int distance, double total_time, StepMode mode = StepMode::standard);

/// Golden-section maximization of F over J0 in [bracket_lo, bracket_hi]
/// (defaults 0.1 J .. 1.5 J), resolved to x_tol in J0. A 3-point sanity
/// check guards the unimodality assumption; on violation the result is a
/// fine-grid scan maximum with used_grid_fallback set.
CouplingOptimum optimize_coupling(const SystemParams& base, int distance,
                                  double total_time,
                                  StepMode mode = StepMode::standard,
                                  double bracket_lo = -1.0,
                                  double bracket_hi = -1.0,
                                  double x_tol = 1e-3);

/// Smallest tau with optimized fidelity >= f_target, resolved to 1%
/// relative by outer bisection with optimize_coupling at each candidate.
/// Throws std::runtime_error when the target is unreachable within tau_cap.
TimeOptimum minimum_transfer_time(const SystemParams& base, int distance,
                                  double f_target = 0.995,
                                  double tau_cap = 1e5,
                                  StepMode mode = StepMode::standard);

/// OLS fit over (x, y) pairs; requires >= 3 points with non-degenerate x.
FitResult linear_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace qst

#endif
