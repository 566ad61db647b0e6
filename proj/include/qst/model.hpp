#ifndef QST_MODEL_HPP
#define QST_MODEL_HPP

#include <Eigen/Dense>

#include <stdexcept>

namespace qst {

/// Which endpoint dot a pulse or matrix element refers to.
enum class Dot { A, B };

/// Physical and protocol parameters of the gated two-dot / N-site chain device.
///
/// Energies are dimensionless in units of the chain hopping J (kept as an
/// explicit field so unit-scaling checks remain possible); times are in 1/J.
/// The right attachment site is always derived as l' = N + 1 - l and the
/// transfer distance as D = N + 2 - 2l.
struct SystemParams {
  int n_chain;                // N, number of chain sites
  int attach_left;            // l, chain site coupled to dot A (1-based)
  double hop_chain;           // J > 0
  double hop_endpoint;        // J0 >= 0 (J0 = 0 is a valid diagnostic input)
  double peak_voltage;        // mu0 > 0
  double total_time;          // tau > 0
  double pulse_width_factor;  // alpha * tau, default 8

  SystemParams(int n_chain_, int attach_left_, double hop_chain_,
               double hop_endpoint_, double peak_voltage_, double total_time_,
               double pulse_width_factor_ = 8.0);

  /// Derived attachment site of dot B, l' = N + 1 - l.
  int attach_right() const { return n_chain + 1 - attach_left; }

  /// Transfer distance D = l' + 1 - l = N + 2 - 2l.
  int distance() const { return n_chain + 2 - 2 * attach_left; }

  /// Dimension of the single-particle space, N + 2.
  int dim() const { return n_chain + 2; }

  /// Gaussian width parameter alpha = pulse_width_factor / tau.
  double alpha() const { return pulse_width_factor / total_time; }

  /// True when mu0 < 5 * max(J, J0); the adiabatic picture assumes the pulse
  /// peak dominates the hopping scales. Advisory only, never enforced.
  bool weak_pulse_warning() const;

  /// Builds params for a requested transfer distance D, deriving
  /// l = (N + 2 - D) / 2. Throws when D does not correspond to an integer
  /// attachment site, naming the offending value.
  static SystemParams for_distance(int n_chain, int distance, double hop_chain,
                                   double hop_endpoint, double peak_voltage,
                                   double total_time,
                                   double pulse_width_factor = 8.0);
};

/// Dense symmetric Hamiltonian matrix at a fixed time, basis [A, 1..N, B]
/// (row/col 0 is dot A, 1..N the chain, N+1 is dot B).
struct HamiltonianSnapshot {
  int dim;
  double time;
  Eigen::MatrixXd matrix;
};

/// Index of dot A in the [A, 1..N, B] basis.
inline int index_a() { return 0; }
/// Index of dot B.
inline int index_b(int n_chain) { return n_chain + 1; }
/// Index of chain site j (1-based).
inline int index_site(int j) { return j; }

/// Mirror-conjugate index: chain site j <-> N+1-j, A <-> B. Operates on the
/// internal [A, 1..N, B] indices 0..N+1, where it is i -> N+1-i.
int mirror_index(int index, int n_chain);

/// Gate voltage mu_dot(t) = -mu0 * exp(-alpha^2 t^2 / 2) for dot A, with
/// t replaced by t - tau for dot B. No clamping outside [0, tau].
double pulse_voltage(const SystemParams& params, Dot dot, double t);

/// Analytic time derivative of pulse_voltage.
double pulse_derivative(const SystemParams& params, Dot dot, double t);

/// Assembles H(t): -J on chain bonds, -J0 on (A,l) and (B,l'), pulse
/// voltages on the two dot diagonals, zeros elsewhere. Exactly symmetric.
HamiltonianSnapshot build_hamiltonian(const SystemParams& params, double t);

}  // namespace qst

#endif
