#include "qst/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qst {

SystemParams::SystemParams(int n_chain_, int attach_left_, double hop_chain_,
                           double hop_endpoint_, double peak_voltage_,
                           double total_time_, double pulse_width_factor_)
    : n_chain(n_chain_),
      attach_left(attach_left_),
      hop_chain(hop_chain_),
      hop_endpoint(hop_endpoint_),
      peak_voltage(peak_voltage_),
      total_time(total_time_),
      pulse_width_factor(pulse_width_factor_) {
  if (n_chain < 1) {
    throw std::invalid_argument("n_chain must be >= 1, got " +
                                std::to_string(n_chain));
  }
  if (attach_left < 1 || 2 * attach_left > n_chain) {
    throw std::invalid_argument(
        "attach_left must satisfy 1 <= l <= N/2 (so that D >= 2), got l = " +
        std::to_string(attach_left) + " with N = " + std::to_string(n_chain));
  }
  if (!(hop_chain > 0.0)) {
    throw std::invalid_argument("hop_chain must be > 0");
  }
  if (hop_endpoint < 0.0) {
    throw std::invalid_argument("hop_endpoint must be >= 0");
  }
  if (!(peak_voltage > 0.0)) {
    throw std::invalid_argument("peak_voltage must be > 0");
  }
  if (!(total_time > 0.0)) {
    throw std::invalid_argument("total_time must be > 0");
  }
  if (!(pulse_width_factor > 0.0)) {
    throw std::invalid_argument("pulse_width_factor must be > 0");
  }
}

bool SystemParams::weak_pulse_warning() const {
  return peak_voltage < 5.0 * std::max(hop_chain, hop_endpoint);
}

SystemParams SystemParams::for_distance(int n_chain, int distance,
                                        double hop_chain, double hop_endpoint,
                                        double peak_voltage, double total_time,
                                        double pulse_width_factor) {
  const int twice_l = n_chain + 2 - distance;
  if (twice_l % 2 != 0) {
    throw std::invalid_argument(
        "distance " + std::to_string(distance) + " is not admissible for N = " +
        std::to_string(n_chain) + ": N + 2 - D must be even");
  }
  const int l = twice_l / 2;
  if (l < 1 || distance < 2) {
    throw std::invalid_argument("distance " + std::to_string(distance) +
                                " is out of range for N = " +
                                std::to_string(n_chain));
  }
  return SystemParams(n_chain, l, hop_chain, hop_endpoint, peak_voltage,
                      total_time, pulse_width_factor);
}

int mirror_index(int index, int n_chain) {
  if (index < 0 || index > n_chain + 1) {
    throw std::invalid_argument("site index out of range");
  }
  return n_chain + 1 - index;
}

double pulse_voltage(const SystemParams& params, Dot dot, double t) {
  const double alpha = params.alpha();
  const double s = (dot == Dot::A) ? t : t - params.total_time;
  return -params.peak_voltage * std::exp(-0.5 * alpha * alpha * s * s);
}

double pulse_derivative(const SystemParams& params, Dot dot, double t) {
  const double alpha = params.alpha();
  const double s = (dot == Dot::A) ? t : t - params.total_time;
  return params.peak_voltage * alpha * alpha * s *
         std::exp(-0.5 * alpha * alpha * s * s);
}

HamiltonianSnapshot build_hamiltonian(const SystemParams& params, double t) {
  const int n = params.n_chain;
  const int dim = params.dim();
  const int a = index_a();
  const int b = index_b(n);
  const int l = params.attach_left;
  const int lp = params.attach_right();

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 1; j < n; ++j) {
    h(j, j + 1) = -params.hop_chain;
    h(j + 1, j) = -params.hop_chain;
  }
  h(a, l) = -params.hop_endpoint;
  h(l, a) = -params.hop_endpoint;
  h(b, lp) = -params.hop_endpoint;
  h(lp, b) = -params.hop_endpoint;
  h(a, a) = pulse_voltage(params, Dot::A, t);
  h(b, b) = pulse_voltage(params, Dot::B, t);

  return HamiltonianSnapshot{dim, t, std::move(h)};
}

}  // namespace qst
