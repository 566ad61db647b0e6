#ifndef QST_DYNAMICS_HPP
#define QST_DYNAMICS_HPP

#include <complex>
#include <vector>

#include "qst/model.hpp"

namespace qst {

/// Per-step unitary integration scheme. Both evaluate the Hamiltonian at the
/// step midpoint; they differ in how the step propagator is formed.
enum class Scheme {
  /// exp(-i H(t + dt/2) dt) evaluated to machine precision (truncated series
  /// on the sparse chain structure, sub-stepped when ||H|| dt is large).
  midpoint_expm,
  /// Cayley form (1 + i H dt/2)^{-1} (1 - i H dt/2), unitary by construction,
  /// solved in O(N) via the chain-plus-two-bonds sparsity.
  cayley,
};

struct PropagateOptions {
  Scheme scheme = Scheme::midpoint_expm;
  /// Run the gate schedule backwards (pulse times evaluated at tau - t).
  /// Equivalent to swapping the roles of dots A and B.
  bool reversed_schedule = false;
};

/// Result of integrating the time-dependent Schroedinger equation over
/// [0, tau]: stored amplitude snapshots, site-group populations and the
/// final transfer fidelity |c_B(tau)|^2.
struct Trajectory {
  struct Populations {
    double dot_a;
    double chain;
    double dot_b;
  };

  std::vector<double> times;                    // n_store points incl. 0, tau
  std::vector<Eigen::VectorXcd> amplitudes;     // state at each stored time
  std::vector<Populations> populations;         // derived |c|^2 groups
  double fidelity = 0.0;                        // |c_B(tau)|^2
  double max_norm_drift = 0.0;                  // max | ||psi||^2 - 1 |
};

/// Default number of stored snapshots.
inline constexpr int kDefaultStoredPoints = 501;

/// Default step count: at least 40 steps per period of the fastest scale,
/// ceil(40 tau max(mu0, 2J, 2J0) / (2 pi)).
long default_step_count(const SystemParams& params);

/// Integrates i d/dt psi = H(t) psi from t = 0 to tau with n_steps uniform
/// steps, storing n_store equally spaced snapshots (endpoints included).
/// The initial state must be unit norm to 1e-12. Norm drift beyond 1e-6
/// raises std::runtime_error (the step size is too coarse for the scheme).
Trajectory propagate(const SystemParams& params,
                     const Eigen::VectorXcd& initial, long n_steps,
                     int n_store, const PropagateOptions& options = {});

/// Full protocol from the sender dot: initial = |A>, default stores.
/// n_steps = 0 selects default_step_count(params).
Trajectory run_transfer(const SystemParams& params, long n_steps = 0,
                        int n_store = kDefaultStoredPoints,
                        const PropagateOptions& options = {});

/// Testing oracle: applies the exact unitary exp(-i H(t + dt/2) dt) via full
/// eigendecomposition of the midpoint snapshot. Used in tests and
/// convergence studies only; independent of the propagate code path.
Eigen::VectorXcd exact_step_oracle(const SystemParams& params,
                                   const Eigen::VectorXcd& state, double t,
                                   double dt);

}  // namespace qst

#endif
