#include "qst/adiabatic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qst {

double bound_state_lambda_plus(double peak_voltage, double hop_endpoint) {
  const double root = std::sqrt(peak_voltage * peak_voltage +
                                4.0 * hop_endpoint * hop_endpoint);
  return 0.5 * (root + peak_voltage);
}

double bound_state_lambda_minus(double peak_voltage, double hop_endpoint) {
  const double root = std::sqrt(peak_voltage * peak_voltage +
                                4.0 * hop_endpoint * hop_endpoint);
  return 0.5 * (root - peak_voltage);
}

AnalyticGroundState analytic_ground_state_initial(const SystemParams& params) {
  if (params.hop_endpoint <= 0.0) {
    throw std::invalid_argument(
        "analytic_ground_state_initial: requires J0 > 0");
  }
  const int n = params.n_chain;
  const int l = params.attach_left;
  const double j0 = params.hop_endpoint;

  AnalyticGroundState state;
  state.lambda_plus = bound_state_lambda_plus(params.peak_voltage, j0);
  state.lambda_minus = bound_state_lambda_minus(params.peak_voltage, j0);
  state.kappa = std::log(state.lambda_plus / params.hop_chain);

  double tail_sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    tail_sum += std::exp(-2.0 * state.kappa * std::abs(j - l));
  }
  state.norm_factor =
      tail_sum + (params.peak_voltage * params.peak_voltage + 2.0 * j0 * j0) /
                     (j0 * j0);

  Eigen::VectorXd amp(params.dim());
  amp(index_a()) = state.lambda_plus / j0;
  for (int j = 1; j <= n; ++j) {
    amp(index_site(j)) = std::exp(-state.kappa * std::abs(j - l));
  }
  amp(index_b(n)) =
      (state.lambda_minus / j0) * std::exp(-state.kappa * (n + 1 - 2 * l));
  // The closed-form norm_factor drops the exponential on the B amplitude;
  // normalize by the actual sum of squares so the vector is exactly unit.
  state.amplitudes = amp / amp.norm();
  return state;
}

double transfer_potential(const SystemParams& params, double eps, Dot dot,
                          double t) {
  const double j0 = params.hop_endpoint;
  if (j0 == 0.0) {
    return 0.0;
  }
  const double denom = eps + pulse_voltage(params, dot, t);
  if (std::abs(denom) < 1e-300) {
    throw std::domain_error(
        "transfer_potential: pole at eps = -mu_dot(t)");
  }
  return j0 * j0 / denom;
}

double bound_state_residual(const Eigen::VectorXd& state, double eps,
                            const SystemParams& params, double t) {
  const HamiltonianSnapshot h = build_hamiltonian(params, t);
  if (state.size() != h.dim) {
    throw std::invalid_argument("bound_state_residual: state dimension");
  }
  return (h.matrix * state - eps * state).lpNorm<Eigen::Infinity>();
}

double adiabaticity_from_spectrum(const Spectrum& spectrum, int n_chain,
                                  double pulse_derivative_a,
                                  double pulse_derivative_b) {
  const double gap = spectrum.eigenvalues(1) - spectrum.eigenvalues(0);
  if (gap < kDegenerateGap) {
    return std::numeric_limits<double>::infinity();
  }
  const int a = index_a();
  const int b = index_b(n_chain);
  const double element =
      pulse_derivative_a * spectrum.eigenvectors(a, 0) *
          spectrum.eigenvectors(a, 1) +
      pulse_derivative_b * spectrum.eigenvectors(b, 0) *
          spectrum.eigenvectors(b, 1);
  return std::abs(element) / (gap * gap);
}

double adiabaticity(const SystemParams& params, double t) {
  const Spectrum spectrum = eigendecompose(build_hamiltonian(params, t));
  return adiabaticity_from_spectrum(spectrum, params.n_chain,
                                    pulse_derivative(params, Dot::A, t),
                                    pulse_derivative(params, Dot::B, t));
}

AdiabaticityCurve adiabaticity_curve(const SystemParams& params,
                                     int n_samples) {
  if (n_samples < 33) {
    throw std::invalid_argument("adiabaticity_curve: n_samples must be >= 33");
  }
  const double tau = params.total_time;
  AdiabaticityCurve curve;
  curve.samples.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const double t = tau * i / (n_samples - 1);
    const double value = adiabaticity(params, t);
    curve.samples.emplace_back(t, value);
    if (std::isinf(value)) {
      curve.has_degenerate_samples = true;
    } else if (value > curve.max_value) {
      curve.max_value = value;
    }
  }
  curve.max_value_times_tau = curve.max_value * tau;
  return curve;
}

}  // namespace qst
