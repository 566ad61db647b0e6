#include "qst/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qst/spectral.hpp"

namespace qst {

namespace {

using Complex = std::complex<double>;

/// Applies H(t) with given pulse values to a complex vector without forming
/// the dense matrix. Basis [A, 1..N, B]; out must not alias in.
void apply_hamiltonian(const SystemParams& params, double mu_a, double mu_b,
                       const Complex* in, Complex* out) {
  const int n = params.n_chain;
  const int a = index_a();
  const int b = index_b(n);
  const int l = params.attach_left;
  const int lp = params.attach_right();
  const double j = params.hop_chain;
  const double j0 = params.hop_endpoint;

  if (n == 1) {
    out[1] = Complex(0.0, 0.0);
  } else {
    out[1] = -j * in[2];
    for (int i = 2; i < n; ++i) {
      out[i] = -j * (in[i - 1] + in[i + 1]);
    }
    out[n] = -j * in[n - 1];
  }
  out[l] += -j0 * in[a];
  out[lp] += -j0 * in[b];
  out[a] = mu_a * in[a] - j0 * in[l];
  out[b] = mu_b * in[b] - j0 * in[lp];
}

/// Gershgorin bound on the spectral radius of H(t).
double hamiltonian_norm_bound(const SystemParams& params, double mu_a,
                              double mu_b) {
  const double dot_row =
      std::max(std::abs(mu_a), std::abs(mu_b)) + params.hop_endpoint;
  const double chain_row = 2.0 * params.hop_chain + params.hop_endpoint;
  return std::max(dot_row, chain_row);
}

/// One scheme step: psi <- U(t_mid, dt) psi. Scratch vectors are owned by the
/// caller so the time loop performs no allocation.
class Stepper {
 public:
  Stepper(const SystemParams& params, Scheme scheme)
      : params_(params),
        scheme_(scheme),
        term_(params.dim()),
        scratch_(params.dim()),
        diag_(params.n_chain + 1),
        rhs_(params.dim()) {}

  void step(Eigen::VectorXcd& psi, double mu_a, double mu_b, double dt) {
    if (scheme_ == Scheme::midpoint_expm) {
      expm_step(psi, mu_a, mu_b, dt);
    } else {
      cayley_step(psi, mu_a, mu_b, dt);
    }
  }

 private:
  void expm_step(Eigen::VectorXcd& psi, double mu_a, double mu_b, double dt) {
    // Sub-step so the series argument stays small; exp(-iH dt) =
    // [exp(-iH dt/m)]^m leaves the midpoint evaluation untouched.
    const double theta = hamiltonian_norm_bound(params_, mu_a, mu_b) * dt;
    const int substeps = std::max(1, static_cast<int>(std::ceil(theta / 0.5)));
    const double h = dt / substeps;
    const int dim = params_.dim();
    Complex* term = term_.data();
    Complex* scratch = scratch_.data();
    Complex* out = psi.data();
    for (int s = 0; s < substeps; ++s) {
      for (int i = 0; i < dim; ++i) {
        term[i] = out[i];
      }
      for (int k = 1; k <= 64; ++k) {
        apply_hamiltonian(params_, mu_a, mu_b, term, scratch);
        const Complex coeff = Complex(0.0, -h) / static_cast<double>(k);
        double largest = 0.0;
        for (int i = 0; i < dim; ++i) {
          const Complex v = coeff * scratch[i];
          term[i] = v;
          out[i] += v;
          largest = std::max(largest,
                             std::abs(v.real()) + std::abs(v.imag()));
        }
        if (largest < 1e-17) {
          break;
        }
      }
    }
  }

  void cayley_step(Eigen::VectorXcd& psi, double mu_a, double mu_b,
                   double dt) {
    const int n = params_.n_chain;
    const int a = index_a();
    const int b = index_b(n);
    const int l = params_.attach_left;
    const int lp = params_.attach_right();
    const Complex ilam(0.0, 0.5 * dt);
    const Complex off = -ilam * params_.hop_chain;     // chain bond of M
    const Complex g = -ilam * params_.hop_endpoint;    // dot bond of M
    const Complex da = 1.0 + ilam * mu_a;
    const Complex db = 1.0 + ilam * mu_b;

    // rhs = (1 - i H dt/2) psi
    apply_hamiltonian(params_, mu_a, mu_b, psi.data(), scratch_.data());
    rhs_ = psi - ilam * scratch_;

    // Solve (1 + i H dt/2) x = rhs. Dots A and B are leaves of the coupling
    // graph: absorb them onto their attachment sites, solve the remaining
    // tridiagonal chain by the Thomas algorithm, back-substitute.
    for (int i = 1; i <= n; ++i) {
      diag_[i] = Complex(1.0, 0.0);
    }
    diag_[l] -= g * g / da;
    diag_[lp] -= g * g / db;
    rhs_[l] -= g / da * rhs_[a];
    rhs_[lp] -= g / db * rhs_[b];

    for (int i = 2; i <= n; ++i) {
      const Complex w = off / diag_[i - 1];
      diag_[i] -= w * off;
      rhs_[i] -= w * rhs_[i - 1];
    }
    psi[n] = rhs_[n] / diag_[n];
    for (int i = n - 1; i >= 1; --i) {
      psi[i] = (rhs_[i] - off * psi[i + 1]) / diag_[i];
    }
    psi[a] = (rhs_[a] - g * psi[l]) / da;
    psi[b] = (rhs_[b] - g * psi[lp]) / db;
  }

  const SystemParams& params_;
  Scheme scheme_;
  Eigen::VectorXcd term_;
  Eigen::VectorXcd scratch_;
  std::vector<Complex> diag_;
  Eigen::VectorXcd rhs_;
};

Trajectory::Populations populations_of(const Eigen::VectorXcd& psi,
                                       int n_chain) {
  Trajectory::Populations p{};
  p.dot_a = std::norm(psi[index_a()]);
  p.dot_b = std::norm(psi[index_b(n_chain)]);
  p.chain = 0.0;
  for (int j = 1; j <= n_chain; ++j) {
    p.chain += std::norm(psi[j]);
  }
  return p;
}

}  // namespace

long default_step_count(const SystemParams& params) {
  const double fastest = std::max(
      {params.peak_voltage, 2.0 * params.hop_chain, 2.0 * params.hop_endpoint});
  return static_cast<long>(
      std::ceil(40.0 * params.total_time * fastest / (2.0 * std::numbers::pi)));
}

Trajectory propagate(const SystemParams& params,
                     const Eigen::VectorXcd& initial, long n_steps,
                     int n_store, const PropagateOptions& options) {
  if (initial.size() != params.dim()) {
    throw std::invalid_argument("propagate: initial state dimension mismatch");
  }
  if (n_store < 2 || n_steps < n_store) {
    throw std::invalid_argument(
        "propagate: requires n_steps >= n_store >= 2");
  }
  if (std::abs(initial.squaredNorm() - 1.0) > 1e-12) {
    throw std::invalid_argument("propagate: initial state must be unit norm");
  }

  const double tau = params.total_time;
  const double dt = tau / static_cast<double>(n_steps);
  Stepper stepper(params, options.scheme);

  Trajectory traj;
  traj.times.reserve(n_store);
  traj.amplitudes.reserve(n_store);
  traj.populations.reserve(n_store);

  Eigen::VectorXcd psi = initial;
  auto store = [&](long step) {
    const double t = tau * static_cast<double>(step) / n_steps;
    traj.times.push_back(t);
    traj.amplitudes.push_back(psi);
    traj.populations.push_back(populations_of(psi, params.n_chain));
  };

  store(0);
  long next_slot = 1;
  long next_store_step = (1L * n_steps) / (n_store - 1);
  for (long step = 0; step < n_steps; ++step) {
    double t_mid = (static_cast<double>(step) + 0.5) * dt;
    if (options.reversed_schedule) {
      t_mid = tau - t_mid;
    }
    stepper.step(psi, pulse_voltage(params, Dot::A, t_mid),
                 pulse_voltage(params, Dot::B, t_mid), dt);

    const double drift = std::abs(psi.squaredNorm() - 1.0);
    traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
    if (drift > 1e-6) {
      throw std::runtime_error(
          "propagate: norm drift exceeded 1e-6; step size too coarse for the "
          "chosen scheme");
    }

    if (step + 1 == next_store_step) {
      store(step + 1);
      ++next_slot;
      if (next_slot < n_store) {
        next_store_step = (next_slot * n_steps) / (n_store - 1);
      }
    }
  }

  traj.fidelity = std::norm(psi[index_b(params.n_chain)]);
  return traj;
}

Trajectory run_transfer(const SystemParams& params, long n_steps, int n_store,
                        const PropagateOptions& options) {
  if (n_steps == 0) {
    n_steps = default_step_count(params);
  }
  n_store = static_cast<int>(std::min<long>(n_store, n_steps));
  Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(params.dim());
  initial[index_a()] = Complex(1.0, 0.0);
  return propagate(params, initial, n_steps, n_store, options);
}

Eigen::VectorXcd exact_step_oracle(const SystemParams& params,
                                   const Eigen::VectorXcd& state, double t,
                                   double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("exact_step_oracle: dt must be > 0");
  }
  const Spectrum s =
      eigendecompose(build_hamiltonian(params, t + 0.5 * dt));
  const Eigen::VectorXcd coeffs = s.eigenvectors.transpose() * state;
  Eigen::VectorXcd rotated(coeffs.size());
  for (int k = 0; k < coeffs.size(); ++k) {
    rotated[k] =
        coeffs[k] * std::polar(1.0, -s.eigenvalues[k] * dt);
  }
  return s.eigenvectors * rotated;
}

}  // namespace qst
