#include "qst/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qst/golden_section.hpp"
#include "qst/parallel.hpp"
#include "qst/spectral.hpp"

namespace qst {

namespace {

std::map<std::string, double> base_inputs(const SystemParams& p) {
  return {
      {"n_chain", static_cast<double>(p.n_chain)},
      {"distance", static_cast<double>(p.distance())},
      {"hop_chain", p.hop_chain},
      {"hop_endpoint", p.hop_endpoint},
      {"peak_voltage", p.peak_voltage},
      {"total_time", p.total_time},
      {"pulse_width_factor", p.pulse_width_factor},
  };
}

long sweep_steps(const SystemParams& p, StepMode mode) {
  const long steps = default_step_count(p);
  return mode == StepMode::fast ? std::max(2L, steps / 4) : steps;
}

double transfer_fidelity(const SystemParams& p, StepMode mode) {
  return run_transfer(p, sweep_steps(p, mode), 2).fidelity;
}

}  // namespace

SystemParams with_distance(const SystemParams& base, int distance) {
  return SystemParams::for_distance(base.n_chain, distance, base.hop_chain,
                                    base.hop_endpoint, base.peak_voltage,
                                    base.total_time, base.pulse_width_factor);
}

SystemParams with_coupling(const SystemParams& base, double hop_endpoint) {
  return SystemParams(base.n_chain, base.attach_left, base.hop_chain,
                      hop_endpoint, base.peak_voltage, base.total_time,
                      base.pulse_width_factor);
}

SystemParams with_time(const SystemParams& base, double total_time) {
  return SystemParams(base.n_chain, base.attach_left, base.hop_chain,
                      base.hop_endpoint, base.peak_voltage, total_time,
                      base.pulse_width_factor);
}

std::vector<SweepRecord> gap_vs_distance(const SystemParams& base,
                                         const std::vector<int>& distances,
                                         int n_gap_samples) {
  // Validate the whole grid before any computation.
  std::vector<SystemParams> points;
  points.reserve(distances.size());
  for (int d : distances) {
    points.push_back(with_distance(base, d));
  }

  std::vector<SweepRecord> records(points.size());
  parallel_for_index(static_cast<int>(points.size()), [&](int i) {
    const GapAnalysis gap = gap_analysis(points[i], n_gap_samples);
    SweepRecord rec{base_inputs(points[i]), "min_gap", gap.min_gap};
    rec.inputs["n_gap_samples"] = n_gap_samples;
    records[i] = std::move(rec);
  });
  return records;
}

std::vector<SweepRecord> gap_vs_coupling(const SystemParams& base,
                                         const std::vector<double>& couplings,
                                         int distance, int n_gap_samples) {
  const SystemParams at_distance = with_distance(base, distance);
  std::vector<SystemParams> points;
  points.reserve(couplings.size());
  for (double j0 : couplings) {
    points.push_back(with_coupling(at_distance, j0));
  }

  std::vector<SweepRecord> records(points.size());
  parallel_for_index(static_cast<int>(points.size()), [&](int i) {
    const GapAnalysis gap = gap_analysis(points[i], n_gap_samples);
    SweepRecord rec{base_inputs(points[i]), "min_gap", gap.min_gap};
    rec.inputs["n_gap_samples"] = n_gap_samples;
    records[i] = std::move(rec);
  });
  return records;
}

std::vector<SweepRecord> fidelity_vs_coupling(
    const SystemParams& base, const std::vector<double>& couplings,
    int distance, double total_time, StepMode mode) {
  const SystemParams at_distance =
      with_time(with_distance(base, distance), total_time);
  std::vector<SystemParams> points;
  points.reserve(couplings.size());
  for (double j0 : couplings) {
    points.push_back(with_coupling(at_distance, j0));
  }

  std::vector<SweepRecord> records(points.size());
  parallel_for_index(static_cast<int>(points.size()), [&](int i) {
    SweepRecord rec{base_inputs(points[i]), "fidelity",
                    transfer_fidelity(points[i], mode)};
    rec.inputs["n_steps"] = static_cast<double>(sweep_steps(points[i], mode));
    records[i] = std::move(rec);
  });
  return records;
}

namespace {

// Number of strict interior local maxima of a sampled curve, ignoring
// plateau-level noise.
int count_local_maxima(const std::vector<double>& values) {
  const double tol =
      1e-9 * std::max(1.0, *std::max_element(values.begin(), values.end()));
  int count = 0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] + tol && values[i] > values[i + 1] + tol) {
      ++count;
    }
  }
  return count;
}

}  // namespace

CouplingOptimum optimize_coupling(const SystemParams& base, int distance,
                                  double total_time, StepMode mode,
                                  double bracket_lo, double bracket_hi,
                                  double x_tol) {
  if (bracket_lo < 0.0) {
    bracket_lo = 0.1 * base.hop_chain;
  }
  if (bracket_hi < 0.0) {
    bracket_hi = 1.5 * base.hop_chain;
  }
  if (!(bracket_lo < bracket_hi)) {
    throw std::invalid_argument("optimize_coupling: invalid bracket");
  }
  const SystemParams at_distance =
      with_time(with_distance(base, distance), total_time);
  auto fidelity_at = [&](double j0) {
    return transfer_fidelity(with_coupling(at_distance, j0), mode);
  };

  // Coarse scan first: the fidelity landscape develops several competing
  // maxima in J0 once interference fringes straddle the adiabatic envelope,
  // and a bare golden section can then converge to the wrong branch.
  const int coarse_points = 15;
  const double h = (bracket_hi - bracket_lo) / (coarse_points - 1);
  std::vector<double> coarse(coarse_points);
  parallel_for_index(coarse_points, [&](int i) {
    coarse[i] = fidelity_at(bracket_lo + h * i);
  });
  const int icoarse = static_cast<int>(
      std::max_element(coarse.begin(), coarse.end()) - coarse.begin());
  const double coarse_best = coarse[icoarse];

  const bool unimodal = count_local_maxima(coarse) <= 1 &&
                        icoarse > 0 && icoarse + 1 < coarse_points;
  if (!unimodal) {
    // Fine grid scan, then a golden polish inside the bracketing cells.
    const int grid_points = 57;
    const double hf = (bracket_hi - bracket_lo) / (grid_points - 1);
    std::vector<double> values(grid_points);
    parallel_for_index(grid_points, [&](int i) {
      values[i] = fidelity_at(bracket_lo + hf * i);
    });
    const auto best = std::max_element(values.begin(), values.end());
    const int ibest = static_cast<int>(best - values.begin());
    const double lo = bracket_lo + hf * std::max(ibest - 1, 0);
    const double hi = bracket_lo + hf * std::min(ibest + 1, grid_points - 1);
    auto [j0_ref, f_ref] = golden_section_maximize(fidelity_at, lo, hi, x_tol);
    if (f_ref >= *best) {
      return CouplingOptimum{j0_ref, f_ref, true};
    }
    return CouplingOptimum{bracket_lo + hf * ibest, *best, true};
  }

  auto [j0_opt, f_opt] = golden_section_maximize(
      fidelity_at, bracket_lo + h * (icoarse - 1),
      bracket_lo + h * (icoarse + 1), x_tol);
  if (coarse_best > f_opt) {  // never report less than an evaluated point
    j0_opt = bracket_lo + h * icoarse;
    f_opt = coarse_best;
  }
  return CouplingOptimum{j0_opt, f_opt, false};
}

TimeOptimum minimum_transfer_time(const SystemParams& base, int distance,
                                  double f_target, double tau_cap,
                                  StepMode mode) {
  if (!(f_target > 0.0 && f_target < 1.0)) {
    throw std::invalid_argument("minimum_transfer_time: f_target in (0, 1)");
  }
  auto optimum_at = [&](double tau, double x_tol) {
    return optimize_coupling(base, distance, tau, mode, -1.0, -1.0, x_tol);
  };

  // The optimized fidelity rises steeply to its first threshold crossing and
  // then oscillates about the envelope, so a coarse doubling search can skip
  // the edge and land on a much later crossing. Scan upward in 10% steps
  // (with a cheaper inner tolerance) to bracket the first crossing, then
  // bisect at full tolerance.
  constexpr double kScanFactor = 1.1;
  constexpr double kScanTol = 5e-3;
  constexpr double kFinalTol = 1e-3;
  double tau_lo = 0.0;  // highest tau known to fail
  double tau_hi = std::min(50.0, tau_cap);
  while (optimum_at(tau_hi, kScanTol).fidelity < f_target) {
    tau_lo = tau_hi;
    tau_hi *= kScanFactor;
    if (tau_hi > tau_cap) {
      throw std::runtime_error(
          "minimum_transfer_time: fidelity target unreachable within tau cap");
    }
  }
  CouplingOptimum at_hi = optimum_at(tau_hi, kFinalTol);
  while (at_hi.fidelity < f_target) {
    // The coarse-tolerance scan saw a pass that full tolerance does not
    // reproduce; keep climbing at full tolerance.
    tau_lo = tau_hi;
    tau_hi *= kScanFactor;
    if (tau_hi > tau_cap) {
      throw std::runtime_error(
          "minimum_transfer_time: fidelity target unreachable within tau cap");
    }
    at_hi = optimum_at(tau_hi, kFinalTol);
  }
  if (tau_lo == 0.0) {
    // The first guess already passes; scan downward for a failing edge.
    double probe = tau_hi / kScanFactor;
    while (probe >= 1.0) {
      const CouplingOptimum at = optimum_at(probe, kFinalTol);
      if (at.fidelity >= f_target) {
        tau_hi = probe;
        at_hi = at;
        probe /= kScanFactor;
      } else {
        tau_lo = probe;
        break;
      }
    }
    if (tau_lo == 0.0) {
      return TimeOptimum{tau_hi, at_hi.j0_opt, at_hi.fidelity};
    }
  }

  while (tau_hi - tau_lo > 0.01 * tau_hi) {
    const double tau_mid = 0.5 * (tau_lo + tau_hi);
    const CouplingOptimum at_mid = optimum_at(tau_mid, kFinalTol);
    if (at_mid.fidelity >= f_target) {
      tau_hi = tau_mid;
      at_hi = at_mid;
    } else {
      tau_lo = tau_mid;
    }
  }
  return TimeOptimum{tau_hi, at_hi.j0_opt, at_hi.fidelity};
}

FitResult linear_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw std::invalid_argument("linear_fit: needs at least 3 points");
  }
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& [x, y] : points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(points.size());
  mean_y /= static_cast<double>(points.size());

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
    syy += (y - mean_y) * (y - mean_y);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("linear_fit: degenerate x values");
  }

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (const auto& [x, y] : points) {
    const double r = y - (fit.slope * x + fit.intercept);
    ss_res += r * r;
  }
  if (syy == 0.0) {
    fit.r_squared = 1.0;  // residual-free fit to constant data
  } else {
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace qst
