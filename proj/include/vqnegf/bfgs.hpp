// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace vqnegf {

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;   // infinity norm
  double cost_change_tolerance = 1e-12;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

struct BfgsResult {
  Eigen::VectorXd x;             // best point visited by any evaluation
  double f = 0.0;                // cost at x
  std::vector<double> history;   // initial cost, then each accepted step's cost
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

// Evaluates the cost and fills the gradient.
using BfgsObjective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Inverse-Hessian BFGS with a strong-Wolfe line search. A failed line search
// retries once along steepest descent from a reset Hessian; a second failure
// stops with converged = false.
BfgsResult minimize_bfgs(const BfgsObjective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options);

}  // namespace vqnegf
