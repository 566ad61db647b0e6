#ifndef QST_ADIABATIC_HPP
#define QST_ADIABATIC_HPP

#include <utility>
#include <vector>

#include "qst/model.hpp"
#include "qst/spectral.hpp"

namespace qst {

/// Closed-form bound-state ground state of the device at t = 0 (deep pulse on
/// dot A, dot B effectively idle). Valid in the regime where the pulse peak
/// dominates the hoppings and the chain tails decay before reaching the
/// edges; treat it as an analytic reference with finite-size corrections,
/// not an exact eigenstate.
struct AnalyticGroundState {
  double lambda_plus;   // (sqrt(mu0^2 + 4 J0^2) + mu0) / 2
  double lambda_minus;  // (sqrt(mu0^2 + 4 J0^2) - mu0) / 2
  double kappa;         // ln(lambda_plus / J), chain decay rate
  double norm_factor;   // sum_j e^{-2 kappa |j-l|} + (mu0^2 + 2 J0^2) / J0^2
  Eigen::VectorXd amplitudes;  // over [A, 1..N, B], unit norm
};

/// lambda_+ of the two-level reduction; exposed standalone so the
/// mu0 -> 0 limit is testable without constructing SystemParams.
double bound_state_lambda_plus(double peak_voltage, double hop_endpoint);
/// lambda_-; satisfies lambda_+ * lambda_- = J0^2.
double bound_state_lambda_minus(double peak_voltage, double hop_endpoint);

/// Builds the analytic t = 0 ground state. Throws when J0 = 0 (the dot
/// amplitudes are undefined there).
AnalyticGroundState analytic_ground_state_initial(const SystemParams& params);

/// Energy-dependent effective potential J0^2 / (eps + mu_dot(t)) the dots
/// exert on their attachment sites. Throws on the pole eps = -mu_dot(t).
double transfer_potential(const SystemParams& params, double eps, Dot dot,
                          double t);

/// Max-norm residual || H(t) state - eps state ||_inf; zero for an exact
/// eigenpair. The state must be normalized over [A, 1..N, B].
double bound_state_residual(const Eigen::VectorXd& state, double eps,
                            const SystemParams& params, double t);

/// Adiabaticity parameter at time t:
///   A(t) = |<psi_g| dH/dt |psi_1>| / (eps_1 - eps_g)^2.
/// dH/dt is diagonal with only the two dot entries nonzero, so the matrix
/// element is mu'_A psi_g[A] psi_1[A] + mu'_B psi_g[B] psi_1[B].
/// Returns +infinity when the gap is degenerate (< kDegenerateGap).
double adiabaticity(const SystemParams& params, double t);

/// Same quantity computed from an existing Spectrum with injected pulse
/// derivatives (so the zero-drive limit is directly testable).
double adiabaticity_from_spectrum(const Spectrum& spectrum, int n_chain,
                                  double pulse_derivative_a,
                                  double pulse_derivative_b);

/// A(t) sampled on a uniform grid over [0, tau].
struct AdiabaticityCurve {
  std::vector<std::pair<double, double>> samples;  // (t, A(t))
  double max_value = 0.0;
  double max_value_times_tau = 0.0;
  bool has_degenerate_samples = false;  // samples where A(t) is infinite
};

/// Samples the adiabaticity parameter; n_samples >= 33. Degenerate samples
/// carry +infinity and set the flag; they are excluded from the maxima.
AdiabaticityCurve adiabaticity_curve(const SystemParams& params,
                                     int n_samples);

/// Default grid size for diagnostic curves (odd, so tau/2 is a grid point).
inline constexpr int kDefaultCurveSamples = 1001;

}  // namespace qst

#endif
