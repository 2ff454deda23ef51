// SPDX-License-Identifier: Apache-2.0
#include "vqnegf/vqls.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

#include "vqnegf/oracle.hpp"

namespace vqnegf {

namespace {

constexpr double kLogClamp = 1e-12;
constexpr double kDegenerateV = 1e-14;

using Eigen::VectorXcd;
using Eigen::VectorXd;

VectorXd pbar_diagonal(int n_qubits) {
  const std::uint64_t dim = std::uint64_t{1} << n_qubits;
  VectorXd pbar(static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < dim; ++i) {
    pbar(static_cast<Eigen::Index>(i)) =
        static_cast<double>(n_qubits - std::popcount(i)) / n_qubits;
  }
  return pbar;
}

double local_overlap(const AssembledSystem& system, const VectorXd& pbar,
                     const VectorXcd& a_psi) {
  const QState phi =
      apply_ub(system.ub, state_from_vector(system.n_qubits, a_psi), true);
  double w = 0.0;
  for (Eigen::Index i = 0; i < phi.amplitudes.size(); ++i) {
    w += pbar(i) * std::norm(phi.amplitudes(i));
  }
  return w;
}

CostPrimitives primitives_from_a_psi(const AssembledSystem& system,
                                     const VectorXd& pbar, const QState& state,
                                     const VectorXcd& a_psi, double v) {
  if (v < kDegenerateV) {
    throw std::runtime_error(
        "degenerate state: <psi|A^dag A|psi> below 1e-14");
  }
  CostPrimitives p;
  p.u = system.b.dot(a_psi);
  p.v = v;
  p.w = local_overlap(system, pbar, a_psi);
  p.u_b = system.b.dot(state.amplitudes);
  p.t = state.amplitudes.dot(a_psi);
  return p;
}

}  // namespace

AnsatzVariant ansatz_variant_from_string(const std::string& name) {
  if (name == "crz_ry_circular") return AnsatzVariant::crz_ry_circular;
  if (name == "crz_ry_linear") return AnsatzVariant::crz_ry_linear;
  if (name == "ry_rx_cry_circular") return AnsatzVariant::ry_rx_cry_circular;
  if (name == "ry_rx_cry_linear") return AnsatzVariant::ry_rx_cry_linear;
  throw std::invalid_argument("unknown ansatz variant: " + name);
}

std::string to_string(AnsatzVariant variant) {
  switch (variant) {
    case AnsatzVariant::crz_ry_circular: return "crz_ry_circular";
    case AnsatzVariant::crz_ry_linear: return "crz_ry_linear";
    case AnsatzVariant::ry_rx_cry_circular: return "ry_rx_cry_circular";
    case AnsatzVariant::ry_rx_cry_linear: return "ry_rx_cry_linear";
  }
  throw std::invalid_argument("invalid ansatz variant value");
}

CostKind cost_kind_from_string(const std::string& name) {
  if (name == "global") return CostKind::global;
  if (name == "local") return CostKind::local;
  if (name == "energy") return CostKind::energy;
  if (name == "normalized_residual") return CostKind::normalized_residual;
  if (name == "hybrid") return CostKind::hybrid;
  throw std::invalid_argument("unknown cost kind: " + name);
}

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::global: return "global";
    case CostKind::local: return "local";
    case CostKind::energy: return "energy";
    case CostKind::normalized_residual: return "normalized_residual";
    case CostKind::hybrid: return "hybrid";
  }
  throw std::invalid_argument("invalid cost kind value");
}

int param_count(const AnsatzSpec& spec) {
  if (spec.n_qubits < 2) {
    throw std::invalid_argument("ansatz requires at least 2 qubits");
  }
  if (spec.layers < 1) {
    throw std::invalid_argument("ansatz requires at least 1 layer");
  }
  const int n = spec.n_qubits;
  switch (spec.variant) {
    case AnsatzVariant::crz_ry_circular: return spec.layers * 2 * n;
    case AnsatzVariant::crz_ry_linear: return spec.layers * (2 * n - 1);
    case AnsatzVariant::ry_rx_cry_circular: return spec.layers * 3 * n;
    case AnsatzVariant::ry_rx_cry_linear: return spec.layers * (3 * n - 1);
  }
  throw std::invalid_argument("invalid ansatz variant value");
}

Theta init_params(const AnsatzSpec& spec, std::uint64_t seed) {
  const int count = param_count(spec);
  std::mt19937_64 rng(seed);
  Theta theta(count);
  for (int i = 0; i < count; ++i) {
    // 53-bit uniform on the open interval (0, 1).
    const double u =
        (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double s = std::sin(std::numbers::pi * u / 2.0);
    theta(i) = std::numbers::pi * s * s;
  }
  return theta;
}

Circuit build_ansatz(const AnsatzSpec& spec, const Theta& theta) {
  const int expected = param_count(spec);
  if (theta.size() != expected) {
    throw std::invalid_argument("theta length does not match ansatz spec");
  }
  const int n = spec.n_qubits;
  const bool circular = spec.variant == AnsatzVariant::crz_ry_circular ||
                        spec.variant == AnsatzVariant::ry_rx_cry_circular;
  const bool two_rotations =
      spec.variant == AnsatzVariant::ry_rx_cry_circular ||
      spec.variant == AnsatzVariant::ry_rx_cry_linear;
  const GateKind entangler =
      two_rotations ? GateKind::CRY : GateKind::CRZ;
  const int pairs = circular ? n : n - 1;

  Circuit circuit{n, {}};
  circuit.gates.reserve(static_cast<std::size_t>(expected));
  int p = 0;
  for (int layer = 0; layer < spec.layers; ++layer) {
    for (int q = 0; q < n; ++q) {
      circuit.gates.push_back(Gate{GateKind::RY, q, -1, theta(p++)});
    }
    if (two_rotations) {
      for (int q = 0; q < n; ++q) {
        circuit.gates.push_back(Gate{GateKind::RX, q, -1, theta(p++)});
      }
    }
    for (int j = 0; j < pairs; ++j) {
      circuit.gates.push_back(
          Gate{entangler, (j + 1) % n, j, theta(p++)});
    }
  }
  return circuit;
}

QState apply_ub(const UbSpec& ub, const QState& state, bool adjoint) {
  if (state.n_qubits != ub.n_qubits) {
    throw std::invalid_argument("U_b qubit count mismatch");
  }
  if ((ub.control_mask & ub.flip_value) != 0) {
    throw std::logic_error("U_b flip must not touch its control bits");
  }
  VectorXcd amps = state.amplitudes;
  const std::uint64_t dim = std::uint64_t{1} << ub.n_qubits;

  const auto apply_pi = [&]() {
    if (ub.flip_value == 0) return;
    VectorXcd out(amps.size());
    for (std::uint64_t i = 0; i < dim; ++i) {
      const std::uint64_t j =
          (i & ub.control_mask) == ub.control_mask ? (i ^ ub.flip_value) : i;
      out(static_cast<Eigen::Index>(j)) = amps(static_cast<Eigen::Index>(i));
    }
    amps.swap(out);
  };
  const auto apply_hadamards = [&]() {
    for (int bit = 0; bit < ub.n_qubits; ++bit) {
      if ((ub.hadamard_mask >> bit) & 1) {
        detail::apply_hadamard_inplace(amps, ub.n_qubits, bit);
      }
    }
  };

  if (adjoint) {
    apply_pi();
    apply_hadamards();
  } else {
    apply_hadamards();
    apply_pi();
  }
  return state_from_vector(ub.n_qubits, std::move(amps));
}

CostPrimitives evaluate_primitives(const AssembledSystem& system,
                                   const QState& state) {
  if (state.n_qubits != system.n_qubits) {
    throw std::invalid_argument("state and system qubit counts differ");
  }
  const VectorXcd a_psi = apply_operator_sum(state, system.A_sum);
  const double v = expectation(state, system.adaga_sum).real();
  return primitives_from_a_psi(system, pbar_diagonal(system.n_qubits), state,
                               a_psi, v);
}

double evaluate_cost(CostKind kind, const CostPrimitives& p, double alpha) {
  switch (kind) {
    case CostKind::global:
      return 1.0 - std::norm(p.u) / p.v;
    case CostKind::local:
      return 1.0 - p.w / p.v;
    case CostKind::normalized_residual: {
      const double ru = p.u.real();
      return -(ru * ru) / p.v;
    }
    case CostKind::hybrid: {
      const double ru = p.u.real();
      const double cnr = -(ru * ru) / p.v;
      const double cl = 1.0 - p.w / p.v;
      return alpha * cnr + (1.0 - alpha) * std::log(std::max(cl, kLogClamp));
    }
    case CostKind::energy: {
      const double r = p.u_b.real();
      const double t = p.t.real();
      if (t <= 0.0) {
        throw std::domain_error(
            "energy cost requires positive <psi|A|psi> (Hermitian "
            "positive-definite A)");
      }
      return -2.0 * r * r / t;
    }
  }
  throw std::invalid_argument("invalid cost kind value");
}

double k_star(const CostPrimitives& p) {
  if (p.v <= 0.0) {
    throw std::domain_error("k* undefined for non-positive <psi|A^dag A|psi>");
  }
  return p.u.real() / p.v;
}

CostEvaluator::CostEvaluator(const AssembledSystem& system, CostKind kind,
                             double alpha)
    : system_(system),
      kind_(kind),
      alpha_(alpha),
      a_adjoint_(adjoint(system.A_sum)),
      pbar_(pbar_diagonal(system.n_qubits)) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in [0, 1]");
  }
  const QState b_state = state_from_vector(system.n_qubits, system.b);
  adag_b_ = apply_operator_sum(b_state, a_adjoint_);
}

CostPrimitives CostEvaluator::primitives(const QState& psi) const {
  if (psi.n_qubits != system_.n_qubits) {
    throw std::invalid_argument("state and system qubit counts differ");
  }
  const VectorXcd a_psi = apply_operator_sum(psi, system_.A_sum);
  const double v = expectation(psi, system_.adaga_sum).real();
  return primitives_from_a_psi(system_, pbar_, psi, a_psi, v);
}

double CostEvaluator::cost(const CostPrimitives& p) const {
  return evaluate_cost(kind_, p, alpha_);
}

double CostEvaluator::cost_and_gradient(const Circuit& circuit,
                                        VectorXd& gradient) const {
  const int n = system_.n_qubits;
  if (circuit.n_qubits != n) {
    throw std::invalid_argument("circuit and system qubit counts differ");
  }

  const QState psi = apply_circuit(basis_state(n, 0), circuit);
  const VectorXcd a_psi = apply_operator_sum(psi, system_.A_sum);
  const VectorXcd q_psi = apply_operator_sum(psi, system_.adaga_sum);
  const Complex v_full = psi.amplitudes.dot(q_psi);
  if (std::abs(v_full.imag()) > 1e-8) {
    throw std::runtime_error(
        "Hermitian-flagged operator produced an imaginary expectation");
  }
  const CostPrimitives p =
      primitives_from_a_psi(system_, pbar_, psi, a_psi, v_full.real());
  const double cost = evaluate_cost(kind_, p, alpha_);

  // mu collects d(cost)/d<psi| so that d(cost)/d(theta_k) =
  // 2 Re <mu | d psi / d theta_k>.
  VectorXcd mu = VectorXcd::Zero(psi.amplitudes.size());
  const auto add_nr_terms = [&](double scale) {
    const double ru = p.u.real();
    mu.noalias() += scale * (-ru / p.v) * adag_b_;
    mu.noalias() += scale * (ru * ru / (p.v * p.v)) * q_psi;
  };
  const auto r_psi = [&]() -> VectorXcd {
    // A^dag U_b (pbar o (U_b^dag A psi)): the w-primitive's linear map.
    QState phi =
        apply_ub(system_.ub, state_from_vector(n, a_psi), true);
    for (Eigen::Index i = 0; i < phi.amplitudes.size(); ++i) {
      phi.amplitudes(i) *= pbar_(i);
    }
    const QState back = apply_ub(system_.ub, phi, false);
    return apply_operator_sum(back, a_adjoint_);
  };

  switch (kind_) {
    case CostKind::global:
      mu.noalias() += (-p.u / p.v) * adag_b_;
      mu.noalias() += (std::norm(p.u) / (p.v * p.v)) * q_psi;
      break;
    case CostKind::normalized_residual:
      add_nr_terms(1.0);
      break;
    case CostKind::local: {
      const VectorXcd r = r_psi();
      mu.noalias() += (p.w / (p.v * p.v)) * q_psi;
      mu.noalias() += (-1.0 / p.v) * r;
      break;
    }
    case CostKind::hybrid: {
      add_nr_terms(alpha_);
      const double cl = 1.0 - p.w / p.v;
      if (cl > kLogClamp) {
        const double scale = (1.0 - alpha_) / cl;
        const VectorXcd r = r_psi();
        mu.noalias() += scale * (p.w / (p.v * p.v)) * q_psi;
        mu.noalias() += scale * (-1.0 / p.v) * r;
      }
      break;
    }
    case CostKind::energy: {
      const double r = p.u_b.real();
      const double t = p.t.real();
      if (t <= 0.0) {
        throw std::domain_error(
            "energy cost requires positive <psi|A|psi> (Hermitian "
            "positive-definite A)");
      }
      mu.noalias() += (-2.0 * r / t) * system_.b;
      mu.noalias() += (2.0 * r * r / (t * t)) * a_psi;
      break;
    }
  }

  // Reverse sweep: peel gates off the final state while back-propagating mu.
  int n_params = 0;
  for (const Gate& gate : circuit.gates) {
    if (gate_is_parameterized(gate.kind)) ++n_params;
  }
  gradient.resize(n_params);
  VectorXcd state = psi.amplitudes;
  VectorXcd m = std::move(mu);
  int param = n_params;
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    detail::apply_gate_adjoint_inplace(state, n, *it);
    if (gate_is_parameterized(it->kind)) {
      const VectorXcd d_state = detail::apply_gate_derivative(state, n, *it);
      gradient(--param) = 2.0 * std::real(m.dot(d_state));
    }
    detail::apply_gate_adjoint_inplace(m, n, *it);
  }
  return cost;
}

double CostEvaluator::cost_and_gradient(const AnsatzSpec& spec,
                                        const Theta& theta,
                                        VectorXd& gradient) const {
  return cost_and_gradient(build_ansatz(spec, theta), gradient);
}

VectorXd cost_gradient_fd(const AssembledSystem& system, const AnsatzSpec& spec,
                          CostKind kind, double alpha, const Theta& theta) {
  constexpr double kStep = 1e-6;
  const CostEvaluator evaluator(system, kind, alpha);
  const auto cost_at = [&](const Theta& point) {
    const QState psi = apply_circuit(basis_state(system.n_qubits, 0),
                                     build_ansatz(spec, point));
    return evaluator.cost(evaluator.primitives(psi));
  };
  VectorXd gradient(theta.size());
  Theta probe = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    probe(i) = theta(i) + kStep;
    const double plus = cost_at(probe);
    probe(i) = theta(i) - kStep;
    const double minus = cost_at(probe);
    probe(i) = theta(i);
    gradient(i) = (plus - minus) / (2.0 * kStep);
  }
  return gradient;
}

Eigen::VectorXcd recover_solution(const AssembledSystem& system,
                                  const AnsatzSpec& spec, const Theta& theta,
                                  double k_star_value) {
  const QState psi = apply_circuit(basis_state(system.n_qubits, 0),
                                   build_ansatz(spec, theta));
  return (k_star_value * system.b_norm) * psi.amplitudes;
}

RunResult optimize(const AssembledSystem& system, const AnsatzSpec& spec,
                   const VqlsConfig& config,
                   const Eigen::VectorXcd& oracle_solution) {
  if (spec.n_qubits != system.n_qubits) {
    throw std::invalid_argument("ansatz and system qubit counts differ");
  }
  const CostEvaluator evaluator(system, config.cost, config.alpha);
  const Theta theta0 = init_params(spec, config.seed);

  BfgsOptions options;
  options.max_iterations = config.max_iterations;
  options.gradient_tolerance = config.gradient_tolerance;
  const BfgsObjective objective = [&](const VectorXd& x, VectorXd& g) {
    return evaluator.cost_and_gradient(spec, x, g);
  };
  const BfgsResult opt = minimize_bfgs(objective, theta0, options);

  RunResult result;
  result.theta_opt = opt.x;
  result.cost_history = opt.history;
  result.converged = opt.converged;
  result.iterations = opt.iterations;
  result.final_cost = opt.f;
  const QState psi = apply_circuit(basis_state(system.n_qubits, 0),
                                   build_ansatz(spec, opt.x));
  result.final_primitives = evaluator.primitives(psi);
  result.k_star = k_star(result.final_primitives);
  result.solution = recover_solution(system, spec, opt.x, result.k_star);
  result.mse_vs_oracle = mse(result.solution, oracle_solution);
  return result;
}

RestartStatistics run_restarts(const AssembledSystem& system,
                               const AnsatzSpec& spec, const VqlsConfig& config,
                               int n_runs,
                               const Eigen::VectorXcd& oracle_solution,
                               int threads) {
  if (n_runs < 1) {
    throw std::invalid_argument("run_restarts needs at least one run");
  }
  RestartStatistics stats;
  stats.runs.resize(static_cast<std::size_t>(n_runs));
  stats.run_errors.resize(static_cast<std::size_t>(n_runs));

  std::atomic<int> next{0};
  const auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_runs) return;
      VqlsConfig run_config = config;
      run_config.seed = config.seed + static_cast<std::uint64_t>(i);
      try {
        stats.runs[static_cast<std::size_t>(i)] =
            optimize(system, spec, run_config, oracle_solution);
      } catch (const std::exception& error) {
        stats.run_errors[static_cast<std::size_t>(i)] = error.what();
      }
    }
  };

  const int pool_size = std::clamp(threads, 1, n_runs);
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(pool_size));
    for (int i = 0; i < pool_size; ++i) pool.emplace_back(worker);
    for (std::thread& thread : pool) thread.join();
  }

  std::vector<double> mses;
  mses.reserve(static_cast<std::size_t>(n_runs));
  for (int i = 0; i < n_runs; ++i) {
    if (!stats.run_errors[static_cast<std::size_t>(i)].empty()) continue;
    const RunResult& run = stats.runs[static_cast<std::size_t>(i)];
    mses.push_back(run.mse_vs_oracle);
    if (run.converged) ++stats.converged_count;
  }
  if (mses.empty()) {
    throw std::runtime_error("every restart failed: " +
                             stats.run_errors.front());
  }
  double sum = 0.0;
  for (const double value : mses) sum += value;
  stats.mean_mse = sum / static_cast<double>(mses.size());
  std::vector<double> sorted = mses;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t half = sorted.size() / 2;
  stats.median_mse = (sorted.size() % 2 == 1)
                         ? sorted[half]
                         : 0.5 * (sorted[half - 1] + sorted[half]);
  stats.min_mse = sorted.front();
  return stats;
}

}  // namespace vqnegf
