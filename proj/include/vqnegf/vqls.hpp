// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqnegf/bfgs.hpp"
#include "vqnegf/device.hpp"
#include "vqnegf/qsim.hpp"

namespace vqnegf {

enum class AnsatzVariant {
  crz_ry_circular,
  crz_ry_linear,
  ry_rx_cry_circular,
  ry_rx_cry_linear,
};

AnsatzVariant ansatz_variant_from_string(const std::string& name);
std::string to_string(AnsatzVariant variant);

struct AnsatzSpec {
  AnsatzVariant variant = AnsatzVariant::crz_ry_circular;
  int n_qubits = 0;
  int layers = 1;
};

// crz_ry_circular: L*2n; crz_ry_linear: L*(2n-1); ry_rx_cry_circular: L*3n;
// ry_rx_cry_linear: L*(3n-1).
int param_count(const AnsatzSpec& spec);

using Theta = Eigen::VectorXd;

enum class CostKind { global, local, energy, normalized_residual, hybrid };

CostKind cost_kind_from_string(const std::string& name);
std::string to_string(CostKind kind);

struct VqlsConfig {
  CostKind cost = CostKind::hybrid;
  double alpha = 0.7;
  std::uint64_t seed = 0;
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
  int restarts = 10;
};

struct CostPrimitives {
  Complex u{0.0, 0.0};    // <b|A|psi>
  double v = 0.0;         // <psi|A^dag A|psi>
  double w = 0.0;         // <phi|Pbar|phi>, phi = U_b^dag (A|psi>)
  Complex u_b{0.0, 0.0};  // <b|psi>       (energy cost only)
  Complex t{0.0, 0.0};    // <psi|A|psi>   (energy cost only)
};

struct RunResult {
  Theta theta_opt;
  double k_star = 0.0;
  std::vector<double> cost_history;  // initial cost plus each accepted step
  Eigen::VectorXcd solution;         // physical scale: k* b_norm psi(theta_opt)
  double mse_vs_oracle = 0.0;
  bool converged = false;
  int iterations = 0;
  double final_cost = 0.0;
  CostPrimitives final_primitives;
};

struct RestartStatistics {
  std::vector<RunResult> runs;           // seed order: seed+0 .. seed+n-1
  std::vector<std::string> run_errors;   // empty string when the run succeeded
  double mean_mse = 0.0;
  double median_mse = 0.0;
  double min_mse = 0.0;
  int converged_count = 0;
};

// Each parameter is drawn as pi * sin^2(pi u / 2) with u uniform on (0,1),
// the arcsine-law initialization; deterministic per seed (mt19937_64).
Theta init_params(const AnsatzSpec& spec, std::uint64_t seed);

// L repetitions of [rotation layer; entangler layer]; rotations before
// entanglers, ascending qubit / pair index; circular variants add the
// (n-1, 0) entangler pair.
Circuit build_ansatz(const AnsatzSpec& spec, const Theta& theta);

// U_b = pi o H acting on |0...0>; adjoint applies pi first, then the
// Hadamards (pi is an involutive XOR permutation).
QState apply_ub(const UbSpec& ub, const QState& state, bool adjoint);

CostPrimitives evaluate_primitives(const AssembledSystem& system,
                                   const QState& state);

double evaluate_cost(CostKind kind, const CostPrimitives& p, double alpha);

// k* = Re(u) / v, the argmin over real k of k^2 v - 2 k Re(u).
double k_star(const CostPrimitives& p);

// Precomputes A^dag, A^dag|b>, and the Pbar diagonal; evaluates costs and
// exact reverse-sweep adjoint gradients.
class CostEvaluator {
 public:
  CostEvaluator(const AssembledSystem& system, CostKind kind, double alpha);

  CostPrimitives primitives(const QState& psi) const;
  double cost(const CostPrimitives& p) const;
  // Gradient over the circuit's parameterized gates in circuit order, via one
  // forward pass and one reverse adjoint sweep.
  double cost_and_gradient(const Circuit& circuit,
                           Eigen::VectorXd& gradient) const;
  double cost_and_gradient(const AnsatzSpec& spec, const Theta& theta,
                           Eigen::VectorXd& gradient) const;

  const AssembledSystem& system() const { return system_; }

 private:
  const AssembledSystem& system_;
  CostKind kind_;
  double alpha_;
  OperatorSum a_adjoint_;
  Eigen::VectorXcd adag_b_;
  Eigen::VectorXd pbar_;  // diagonal of (1/n) sum_j |0_j><0_j| (x) I
};

// Central-difference gradient (step 1e-6), the verification fallback.
Eigen::VectorXd cost_gradient_fd(const AssembledSystem& system,
                                 const AnsatzSpec& spec, CostKind kind,
                                 double alpha, const Theta& theta);

Eigen::VectorXcd recover_solution(const AssembledSystem& system,
                                  const AnsatzSpec& spec, const Theta& theta,
                                  double k_star_value);

RunResult optimize(const AssembledSystem& system, const AnsatzSpec& spec,
                   const VqlsConfig& config,
                   const Eigen::VectorXcd& oracle_solution);

// Runs optimize with seeds config.seed + 0 .. + n_runs - 1 (config.seed
// untouched otherwise); results and statistics are assembled in seed order
// regardless of thread count.
RestartStatistics run_restarts(const AssembledSystem& system,
                               const AnsatzSpec& spec, const VqlsConfig& config,
                               int n_runs,
                               const Eigen::VectorXcd& oracle_solution,
                               int threads = 1);

}  // namespace vqnegf
