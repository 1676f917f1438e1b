#include "marketnet/lasso.hpp"

#include <algorithm>
#include <cmath>

namespace marketnet {

namespace {

// Max KKT violation: active coordinates must sit on |grad| = lambda, inactive
// ones inside |grad| <= lambda. grad = xty - gram*beta.
double kkt_violation(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                     const Eigen::VectorXd& beta, double lambda) {
  const Eigen::VectorXd grad = xty - gram * beta;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0)
      worst = std::max(worst, std::abs(grad[j] - lambda * (beta[j] > 0 ? 1.0 : -1.0)));
    else
      worst = std::max(worst, std::abs(grad[j]) - lambda);
  }
  return worst;
}

}  // namespace

Eigen::VectorXd lasso_cd_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                              double lambda, double tol, int max_iter, Eigen::VectorXd warm) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (tol <= 0.0) throw std::invalid_argument("tol must be > 0");
  const Eigen::Index p = gram.rows();
  Eigen::VectorXd beta = (warm.size() == p) ? std::move(warm) : Eigen::VectorXd::Zero(p);
  // residual_grad_j = xty_j - (gram*beta)_j, kept incrementally.
  Eigen::VectorXd grad = xty - gram * beta;
  const double sweep_tol = std::min(tol, 1e-9);

  int iters = 0;
  auto update_coordinate = [&](Eigen::Index j) {
    const double gjj = gram(j, j);
    if (gjj <= 0.0) return 0.0;  // degenerate column, leave at zero
    const double old = beta[j];
    const double next = soft_threshold(grad[j] + gjj * old, lambda) / gjj;
    const double delta = next - old;
    if (delta != 0.0) {
      beta[j] = next;
      grad.noalias() -= delta * gram.col(j);
    }
    return std::abs(delta);
  };

  while (iters < max_iter) {
    // Full sweep establishes the active set.
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) max_delta = std::max(max_delta, update_coordinate(j));
    ++iters;
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < p; ++j)
      if (beta[j] != 0.0) active.push_back(j);
    // Cycle the active set until it stabilizes.
    while (max_delta > sweep_tol && iters < max_iter) {
      max_delta = 0.0;
      for (const auto j : active) max_delta = std::max(max_delta, update_coordinate(j));
      ++iters;
    }
    if (kkt_violation(gram, xty, beta, lambda) <= tol) return beta;
  }
  throw LassoConvergenceError("lasso coordinate descent failed to converge", beta,
                              kkt_violation(gram, xty, beta, lambda));
}

Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                         double tol, int max_iter) {
  if (x.rows() != y.size()) throw std::invalid_argument("X/y row mismatch");
  const double t_obs = static_cast<double>(x.rows());
  const Eigen::MatrixXd gram = (x.transpose() * x) / t_obs;
  const Eigen::VectorXd xty = (x.transpose() * y) / t_obs;
  return lasso_cd_gram(gram, xty, lambda, tol, max_iter);
}

double lasso_lambda_max(const Eigen::VectorXd& xty) {
  return xty.size() == 0 ? 0.0 : xty.cwiseAbs().maxCoeff();
}

std::vector<double> lambda_grid(double lambda_max, int size, double ratio) {
  if (size < 1) throw std::invalid_argument("grid size must be >= 1");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw std::invalid_argument("grid ratio must be in (0, 1]");
  if (lambda_max <= 0.0) return {0.0};
  if (size == 1) return {lambda_max};
  std::vector<double> grid(static_cast<std::size_t>(size));
  const double step = std::log(ratio) / (size - 1);
  for (int i = 0; i < size; ++i) grid[static_cast<std::size_t>(i)] = lambda_max * std::exp(step * i);
  return grid;
}

double ebic_score(Eigen::Index t_obs, Eigen::Index n_predictors, int support, double rss_over_t,
                  double gamma) {
  const double rss = std::max(rss_over_t, 1e-300);
  return static_cast<double>(t_obs) * std::log(rss) +
         support * std::log(static_cast<double>(t_obs)) +
         2.0 * gamma * support * std::log(static_cast<double>(std::max<Eigen::Index>(n_predictors, 2)));
}

LassoPath fit_lasso_path(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double y_var,
                         Eigen::Index t_obs, const std::vector<double>& grid, double gamma,
                         double tol, int max_iter) {
  if (grid.empty()) throw std::invalid_argument("penalty grid must be non-empty");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (grid[i + 1] >= grid[i]) throw std::invalid_argument("penalty grid must be decreasing");
  if (grid.front() < 0.0) throw std::invalid_argument("penalty grid must be non-negative");

  LassoPath path;
  path.points.reserve(grid.size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(gram.rows());
  for (const double lambda : grid) {
    LassoPathPoint pt;
    pt.lambda = lambda;
    pt.beta = lasso_cd_gram(gram, xty, lambda, tol, max_iter, warm);
    warm = pt.beta;
    pt.support = static_cast<int>((pt.beta.array() != 0.0).count());
    pt.rss_over_t = y_var - 2.0 * xty.dot(pt.beta) + pt.beta.dot(gram * pt.beta);
    if (pt.rss_over_t < 0.0) pt.rss_over_t = 0.0;  // round-off near perfect fits
    pt.ebic = ebic_score(t_obs, gram.rows(), pt.support, pt.rss_over_t, gamma);
    path.points.push_back(std::move(pt));
  }
  path.best = 0;
  for (std::size_t i = 1; i < path.points.size(); ++i)
    if (path.points[i].ebic < path.points[path.best].ebic) path.best = i;
  return path;
}

double select_lambda_ebic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double gamma,
                          const std::vector<double>& grid, double tol, int max_iter) {
  const double t_obs = static_cast<double>(x.rows());
  const Eigen::MatrixXd gram = (x.transpose() * x) / t_obs;
  const Eigen::VectorXd xty = (x.transpose() * y) / t_obs;
  const double y_var = y.squaredNorm() / t_obs;
  const auto path = fit_lasso_path(gram, xty, y_var, x.rows(), grid, gamma, tol, max_iter);
  return path.points[path.best].lambda;
}

}  // namespace marketnet
