#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace marketnet {

inline double soft_threshold(double x, double lambda) {
  if (x > lambda) return x - lambda;
  if (x < -lambda) return x + lambda;
  return 0.0;
}

class LassoConvergenceError : public std::runtime_error {
 public:
  LassoConvergenceError(std::string msg, Eigen::VectorXd beta, double kkt)
      : std::runtime_error(std::move(msg)), last_beta(std::move(beta)), kkt_residual(kkt) {}
  Eigen::VectorXd last_beta;
  double kkt_residual;
};

// Minimizes (1/2T)*||y - X b||^2 + lambda*||b||_1 by coordinate descent with
// covariance updates and an active-set sweep. Convergence means every
// coordinate satisfies the soft-threshold KKT condition within tol.
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                         double tol = 1e-7, int max_iter = 100000);

// Same solver on precomputed second moments: gram = X'X/T, xty = X'y/T.
Eigen::VectorXd lasso_cd_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                              double lambda, double tol = 1e-7, int max_iter = 100000,
                              Eigen::VectorXd warm = {});

// Smallest penalty with an all-zero solution.
double lasso_lambda_max(const Eigen::VectorXd& xty);

// size log-spaced penalties from lambda_max down to ratio*lambda_max.
std::vector<double> lambda_grid(double lambda_max, int size = 50, double ratio = 0.01);

struct LassoPathPoint {
  double lambda = 0.0;
  Eigen::VectorXd beta;
  double rss_over_t = 0.0;
  int support = 0;
  double ebic = 0.0;
};

struct LassoPath {
  std::vector<LassoPathPoint> points;  // grid order (decreasing lambda)
  std::size_t best = 0;                // EBIC minimizer, first grid point on ties
};

double ebic_score(Eigen::Index t_obs, Eigen::Index n_predictors, int support, double rss_over_t,
                  double gamma);

// Warm-started path over a decreasing penalty grid; EBIC uses the penalized
// fit's residual sum of squares and support size.
LassoPath fit_lasso_path(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double y_var,
                         Eigen::Index t_obs, const std::vector<double>& grid, double gamma,
                         double tol = 1e-7, int max_iter = 100000);

double select_lambda_ebic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double gamma,
                          const std::vector<double>& grid, double tol = 1e-7,
                          int max_iter = 100000);

}  // namespace marketnet
