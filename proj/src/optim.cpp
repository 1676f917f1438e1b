#include "marketnet/optim.hpp"

#include <cmath>

namespace marketnet {

BfgsResult bfgs_maximize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                         Eigen::VectorXd x0, const BfgsOptions& options) {
  const auto n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  res.f = f(res.x);
  res.grad = grad(res.x);
  res.history.push_back(res.f);

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;
  int small_change_streak = 0;

  for (res.iterations = 0; res.iterations < options.max_iter; ++res.iterations) {
    if (res.grad.cwiseAbs().maxCoeff() <= options.gtol * (1.0 + std::abs(res.f))) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd direction = h_inv * res.grad;  // ascent direction
    double slope = direction.dot(res.grad);
    if (!(slope > 0.0) || !direction.allFinite()) {
      h_inv.setIdentity();
      direction = res.grad;
      slope = res.grad.squaredNorm();
      if (slope == 0.0) {
        res.converged = true;
        break;
      }
    }

    constexpr double armijo = 1e-4;
    double alpha = 1.0;
    double f_new = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + alpha * direction;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new >= res.f + armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stalled: no improving step along this direction

    Eigen::VectorXd g_new = grad(x_new);
    const Eigen::VectorXd step = x_new - res.x;
    const Eigen::VectorXd y = g_new - res.grad;  // gradient change
    const double sy = -step.dot(y);              // curvature for the maximization
    if (sy > 1e-12 * step.norm() * y.norm()) {
      if (first_update) {
        h_inv *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd outer = step * y.transpose();
      h_inv = (Eigen::MatrixXd::Identity(n, n) + rho * outer) * h_inv *
                  (Eigen::MatrixXd::Identity(n, n) + rho * outer.transpose()) +
              rho * step * step.transpose();
    }

    const double delta = f_new - res.f;
    res.x = std::move(x_new);
    res.f = f_new;
    res.grad = std::move(g_new);
    res.history.push_back(res.f);
    if (delta <= options.ftol * (1.0 + std::abs(res.f))) {
      if (++small_change_streak >= 2) {
        res.converged = true;
        break;
      }
    } else {
      small_change_streak = 0;
    }
  }
  return res;
}

}  // namespace marketnet
