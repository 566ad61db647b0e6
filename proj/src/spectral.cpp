#include "qst/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qst/golden_section.hpp"

namespace qst {

namespace {

void fix_phases(Eigen::MatrixXd& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    int imax = 0;
    double best = std::abs(vectors(0, c));
    for (int r = 1; r < vectors.rows(); ++r) {
      const double mag = std::abs(vectors(r, c));
      if (mag > best) {
        best = mag;
        imax = r;
      }
    }
    if (vectors(imax, c) < 0.0) {
      vectors.col(c) = -vectors.col(c);
    }
  }
}

}  // namespace

Spectrum eigendecompose_matrix(const Eigen::MatrixXd& matrix, double time) {
  if (!matrix.allFinite()) {
    throw std::runtime_error("eigendecompose: matrix has non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error(
        "eigendecompose: dense symmetric eigensolver failed to converge");
  }
  Spectrum spectrum{solver.eigenvalues(), solver.eigenvectors(), time};
  fix_phases(spectrum.eigenvectors);
  return spectrum;
}

Spectrum eigendecompose(const HamiltonianSnapshot& h) {
  return eigendecompose_matrix(h.matrix, h.time);
}

std::vector<std::pair<double, Eigen::VectorXd>> chain_spectrum(int n_chain,
                                                               double hop) {
  if (n_chain < 1) {
    throw std::invalid_argument("chain_spectrum: n_chain must be >= 1");
  }
  const double pi = std::numbers::pi;
  std::vector<std::pair<double, Eigen::VectorXd>> pairs;
  pairs.reserve(n_chain);
  const double norm = std::sqrt(2.0 / (n_chain + 1));
  for (int n = 1; n <= n_chain; ++n) {
    const double k = n * pi / (n_chain + 1);
    Eigen::VectorXd v(n_chain);
    for (int j = 1; j <= n_chain; ++j) {
      v(j - 1) = norm * std::sin(k * j);
    }
    pairs.emplace_back(-2.0 * hop * std::cos(k), std::move(v));
  }
  return pairs;  // ascending: -2J cos(k) increases with n
}

double chain_minimum_gap_estimate(int n_chain, double hop) {
  if (n_chain < 2) {
    throw std::invalid_argument(
        "chain_minimum_gap_estimate: n_chain must be >= 2");
  }
  const double pi = std::numbers::pi;
  return 3.0 * hop * pi * pi / (static_cast<double>(n_chain) * n_chain);
}

double instantaneous_gap(const SystemParams& params, double t) {
  const Spectrum s = eigendecompose(build_hamiltonian(params, t));
  return s.eigenvalues(1) - s.eigenvalues(0);
}

GapAnalysis gap_analysis(const SystemParams& params, int n_samples) {
  if (n_samples < 3) {
    throw std::invalid_argument("gap_analysis: n_samples must be >= 3");
  }
  const double tau = params.total_time;

  GapAnalysis result;
  result.gap_curve.reserve(static_cast<std::size_t>(n_samples) + 1);
  int imin = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double t = tau * i / (n_samples - 1);
    const double gap = instantaneous_gap(params, t);
    result.gap_curve.emplace_back(t, gap);
    if (gap < kDegenerateGap) {
      result.has_degenerate_samples = true;
    }
    if (gap < result.gap_curve[imin].second) {
      imin = i;
    }
  }

  // Refine inside the interval bracketing the grid minimum; symmetry suggests
  // tau/2 but the location is searched, not assumed.
  const double lo = result.gap_curve[std::max(imin - 1, 0)].first;
  const double hi = result.gap_curve[std::min(imin + 1, n_samples - 1)].first;
  auto [t_ref, gap_ref] = golden_section_minimize(
      [&params](double t) { return instantaneous_gap(params, t); }, lo, hi,
      tau * 1e-9);
  if (gap_ref < kDegenerateGap) {
    result.has_degenerate_samples = true;
  }

  auto pos = std::lower_bound(
      result.gap_curve.begin(), result.gap_curve.end(), t_ref,
      [](const std::pair<double, double>& s, double t) { return s.first < t; });
  result.gap_curve.insert(pos, {t_ref, gap_ref});

  auto best = std::min_element(result.gap_curve.begin(), result.gap_curve.end(),
                               [](const auto& a, const auto& b) {
                                 return a.second < b.second;
                               });
  result.min_gap = best->second;
  result.t_at_min = best->first;
  return result;
}

}  // namespace qst
