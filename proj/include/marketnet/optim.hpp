#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace marketnet {

struct BfgsOptions {
  int max_iter = 500;
  double gtol = 1e-6;   // on ||grad||_inf relative to 1 + |f|
  double ftol = 1e-12;  // on relative objective change
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // accepted objective values, non-decreasing
};

// BFGS with Armijo backtracking. Only improving steps are accepted, so the
// recorded objective history is monotone.
BfgsResult bfgs_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                         Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace marketnet
