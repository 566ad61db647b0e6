#ifndef QST_SPECTRAL_HPP
#define QST_SPECTRAL_HPP

#include <utility>
#include <vector>

#include "qst/model.hpp"

namespace qst {

/// Full eigen-decomposition of a Hamiltonian snapshot. Eigenvalues ascending;
/// eigenvectors are the matching columns, unit norm and phase-fixed so that
/// the largest-magnitude component of each vector is positive (ties broken by
/// lowest index).
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // column i pairs with eigenvalues[i]
  double time;
};

/// Gap curve epsilon_1(t) - epsilon_g(t) over [0, tau] and its minimum.
/// The minimum is located on the sample grid and then refined by
/// golden-section search inside the bracketing interval; the refined sample
/// is part of gap_curve, so min_gap equals the curve minimum.
struct GapAnalysis {
  double min_gap = 0.0;
  double t_at_min = 0.0;
  std::vector<std::pair<double, double>> gap_curve;  // (t, gap)
  bool has_degenerate_samples = false;  // any sample with gap < 1e-12
};

/// Gap below which a sample is flagged degenerate instead of erroring.
inline constexpr double kDegenerateGap = 1e-12;

/// Dense symmetric eigensolve with the residual/orthonormality contract of
/// Spectrum. Throws std::runtime_error if the solver fails to converge.
Spectrum eigendecompose(const HamiltonianSnapshot& h);

/// Same contract on a bare symmetric matrix (used for sub-blocks in tests).
Spectrum eigendecompose_matrix(const Eigen::MatrixXd& matrix, double time);

/// Analytic spectrum of the isolated N-site chain: eigenvalues
/// -2J cos(n pi / (N+1)) with sine-wave eigenvectors, ascending.
std::vector<std::pair<double, Eigen::VectorXd>> chain_spectrum(int n_chain,
                                                               double hop);

/// Closed-form estimate 3 J pi^2 / N^2 of the chain's minimum gap.
double chain_minimum_gap_estimate(int n_chain, double hop);

/// epsilon_1(t) - epsilon_g(t) of the full system at time t.
double instantaneous_gap(const SystemParams& params, double t);

/// Samples the gap on a uniform n_samples grid over [0, tau] (n_samples >= 3;
/// odd counts place tau/2 on the grid) and refines the minimum.
GapAnalysis gap_analysis(const SystemParams& params, int n_samples);

}  // namespace qst

#endif
