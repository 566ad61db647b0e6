#include <doctest.h>

#include <cmath>
#include <random>

#include "qst/adiabatic.hpp"
#include "qst/sweep.hpp"

using namespace qst;

namespace {
SystemParams unit_coupling_params(int l = 19) {
  return SystemParams(48, l, 1.0, 1.0, 20.0, 480.0);
}
}  // namespace

TEST_CASE("bound-state lambda closed forms") {
  const auto s = analytic_ground_state_initial(unit_coupling_params());
  CHECK(s.lambda_plus == doctest::Approx(20.049876).epsilon(1e-7));
  CHECK(s.lambda_minus == doctest::Approx(0.049876).epsilon(1e-4));
  CHECK(s.kappa == doctest::Approx(2.998222).epsilon(1e-6));
  // algebraic identity lambda+ lambda- = J0^2
  CHECK(std::abs(s.lambda_plus * s.lambda_minus - 1.0) <= 1e-12);

  // symmetric limit mu0 -> 0
  CHECK(bound_state_lambda_plus(0.0, 0.7) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(bound_state_lambda_minus(0.0, 0.7) ==
        doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("analytic ground state is normalized with monotone chain tails") {
  const SystemParams p = unit_coupling_params();
  const auto s = analytic_ground_state_initial(p);
  CHECK(std::abs(s.amplitudes.squaredNorm() - 1.0) <= 1e-12);

  // norm_factor keeps the closed-form expression
  double tails = 0.0;
  for (int j = 1; j <= 48; ++j) {
    tails += std::exp(-2.0 * s.kappa * std::abs(j - 19));
  }
  CHECK(s.norm_factor == doctest::Approx(tails + 402.0).epsilon(1e-14));

  for (int j = 20; j < 48; ++j) {  // decay away from the attachment site
    CHECK(s.amplitudes(j + 1) <= s.amplitudes(j));
  }
  for (int j = 19; j > 1; --j) {
    CHECK(s.amplitudes(j - 1) <= s.amplitudes(j));
  }
}

TEST_CASE("endpoint population reaches 99.7 percent") {
  const auto s = analytic_ground_state_initial(unit_coupling_params());
  const double p_a = s.amplitudes(index_a()) * s.amplitudes(index_a());
  CHECK(p_a >= 0.9970);
  CHECK(p_a <= 0.9980);
  // the closed-form expression gives the same population
  CHECK(s.lambda_plus * s.lambda_plus / s.norm_factor ==
        doctest::Approx(p_a).epsilon(1e-4));
}

TEST_CASE("analytic state requires a nonzero endpoint coupling") {
  const SystemParams p(48, 19, 1.0, 0.0, 20.0, 480.0);
  CHECK_THROWS_AS((void)analytic_ground_state_initial(p),
                  std::invalid_argument);
}

TEST_CASE("analytic state overlaps the numerical ground state") {
  for (int l : {5, 10, 19}) {
    const SystemParams p = unit_coupling_params(l);
    const auto analytic = analytic_ground_state_initial(p);
    const Spectrum s = eigendecompose(build_hamiltonian(p, 0.0));
    CHECK(std::abs(s.eigenvectors.col(0).dot(analytic.amplitudes)) >= 0.999);
  }
}

TEST_CASE("transfer potential formula, pole, and J0 = 0") {
  const SystemParams p = unit_coupling_params();
  // eps chosen so eps + mu_A(0) = -0.05
  CHECK(transfer_potential(p, 19.95, Dot::A, 0.0) ==
        doctest::Approx(-20.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)transfer_potential(p, 20.0, Dot::A, 0.0),
                  std::domain_error);

  const SystemParams pz(48, 19, 1.0, 0.0, 20.0, 480.0);
  CHECK(transfer_potential(pz, 0.3, Dot::A, 0.0) == 0.0);
}

TEST_CASE("dot-site eigenrelation holds through the transfer potential") {
  const SystemParams p = unit_coupling_params();

  // numerically computed ground pair: the A row of the eigen equation reads
  // J0 psi[A] = V(-eps_g) psi[l]
  const Spectrum s = eigendecompose(build_hamiltonian(p, 0.0));
  const double eps_g = s.eigenvalues(0);
  const double lhs = p.hop_endpoint * s.eigenvectors(index_a(), 0);
  const double rhs = transfer_potential(p, -eps_g, Dot::A, 0.0) *
                     s.eigenvectors(p.attach_left, 0);
  CHECK(std::abs(lhs - rhs) <= 1e-8);

  // analytic amplitudes with their bound-state energy scale lambda+
  const auto a = analytic_ground_state_initial(p);
  const double v_a = transfer_potential(p, a.lambda_plus, Dot::A, 0.0);
  CHECK(v_a == doctest::Approx(a.lambda_plus).epsilon(1e-12));
  CHECK(std::abs(p.hop_endpoint * a.amplitudes(index_a()) -
                 v_a * a.amplitudes(p.attach_left)) <= 1e-8);

  // B-side relation at t = tau (third line of the eigen system)
  const double v_b = transfer_potential(p, a.lambda_plus, Dot::B,
                                        p.total_time);
  CHECK(std::abs(p.hop_endpoint * a.amplitudes(index_b(48)) -
                 v_b * a.amplitudes(p.attach_right())) <= 1e-8);
}

TEST_CASE("bound-state residual: eigenpairs, analytic state, random vector") {
  const SystemParams p = unit_coupling_params();
  const HamiltonianSnapshot h = build_hamiltonian(p, 0.0);
  const Spectrum s = eigendecompose(h);
  const double rho = std::max(std::abs(s.eigenvalues(0)),
                              std::abs(s.eigenvalues(p.dim() - 1)));

  CHECK(bound_state_residual(s.eigenvectors.col(0), s.eigenvalues(0), p, 0.0) <=
        1e-9 * rho);

  // closed-form state with its Rayleigh quotient: a deep bound-state
  // approximation with finite-size corrections
  const auto a = analytic_ground_state_initial(p);
  const double rayleigh = a.amplitudes.dot(h.matrix * a.amplitudes);
  const double resid = bound_state_residual(a.amplitudes, rayleigh, p, 0.0);
  CHECK(resid <= 1e-2);
  CHECK(resid > 0.0);

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd rv(p.dim());
  for (int i = 0; i < rv.size(); ++i) {
    rv(i) = gauss(rng);
  }
  rv.normalize();
  CHECK(bound_state_residual(rv, rv.dot(h.matrix * rv), p, 0.0) > 0.1);
}

TEST_CASE("adiabaticity vanishes for a frozen drive and flags degeneracy") {
  const SystemParams p = unit_coupling_params();
  const Spectrum s = eigendecompose(build_hamiltonian(p, 100.0));
  CHECK(adiabaticity_from_spectrum(s, p.n_chain, 0.0, 0.0) == 0.0);

  const SystemParams deep(10, 3, 1.0, 0.0, 1e4, 100.0);
  CHECK(std::isinf(adiabaticity(deep, 50.0)));
}

TEST_CASE("adiabaticity is mirror symmetric in time") {
  const SystemParams p(48, 19, 1.0, 0.9, 20.0, 480.0);
  for (double t : {30.0, 111.0, 180.0, 220.0}) {
    CHECK(std::abs(adiabaticity(p, t) - adiabaticity(p, p.total_time - t)) <=
          1e-8);
  }
}

TEST_CASE("adiabaticity maxima sit away from the pulse midpoint") {
  const SystemParams p(48, 19, 1.0, 0.9, 20.0, 480.0);
  const AdiabaticityCurve curve = adiabaticity_curve(p, 301);
  CHECK_FALSE(curve.has_degenerate_samples);
  CHECK(curve.max_value_times_tau ==
        doctest::Approx(curve.max_value * 480.0).epsilon(1e-14));

  int imax = 0;
  for (int i = 1; i < 301; ++i) {
    if (curve.samples[i].second > curve.samples[imax].second) {
      imax = i;
    }
  }
  const double grid_step = 480.0 / 300.0;
  CHECK(std::abs(curve.samples[imax].first - 240.0) > 2.0 * grid_step);

  // symmetric double-peak: the mirrored sample matches the maximum
  const int imirror = 301 - 1 - imax;
  CHECK(std::abs(curve.samples[imirror].second - curve.max_value) <= 1e-8);

  // the gap at the adiabaticity maxima stays above the true minimum gap
  CHECK(instantaneous_gap(p, curve.samples[imax].first) >
        instantaneous_gap(p, 240.0));
}

TEST_CASE("max adiabaticity-time product has an interior minimum in J0") {
  const SystemParams base(48, 19, 1.0, 0.9, 20.0, 480.0);
  const std::vector<double> j0s{0.3, 0.5, 0.7, 0.9, 1.1};
  double previous_best = 2.0;
  for (int d : {10, 16, 20}) {
    std::vector<double> values;
    for (double j0 : j0s) {
      const SystemParams p = with_coupling(with_distance(base, d), j0);
      values.push_back(adiabaticity_curve(p, 201).max_value_times_tau);
    }
    const int ibest = static_cast<int>(
        std::min_element(values.begin(), values.end()) - values.begin());
    CHECK(ibest > 0);
    CHECK(ibest + 1 < static_cast<int>(values.size()));
    // the minimizing coupling decreases as the distance grows
    CHECK(j0s[ibest] <= previous_best);
    previous_best = j0s[ibest];
  }
}

TEST_CASE("adiabaticity-time product is invariant under schedule rescaling") {
  const SystemParams p1(48, 19, 1.0, 0.9, 20.0, 480.0);
  const SystemParams p2 = with_time(p1, 960.0);
  for (double frac : {0.31, 0.45, 0.5, 0.62, 0.70}) {
    const double a1 = adiabaticity(p1, frac * 480.0) * 480.0;
    const double a2 = adiabaticity(p2, frac * 960.0) * 960.0;
    CHECK(std::abs(a1 - a2) <= 1e-6 * std::abs(a1));
  }
}

TEST_CASE("adiabaticity_curve validates the sample count") {
  CHECK_THROWS_AS((void)adiabaticity_curve(unit_coupling_params(), 32),
                  std::invalid_argument);
}
