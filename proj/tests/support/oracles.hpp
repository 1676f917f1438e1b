#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <random>
#include <vector>

// Test-side oracles, kept independent of the library's solvers.
namespace oracles {

// Least squares via normal equations.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return (x.transpose() * x).ldlt().solve(x.transpose() * y);
}

// Draws T rows from N(0, sigma) through the Cholesky factor.
inline Eigen::MatrixXd sample_mvn(const Eigen::MatrixXd& sigma, int t_obs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  Eigen::MatrixXd z(t_obs, sigma.rows());
  for (int i = 0; i < t_obs; ++i)
    for (int j = 0; j < sigma.cols(); ++j) z(i, j) = normal(rng);
  return z * chol.transpose();
}

// Chain precision matrix: unit diagonal, +/-rho on the first off-diagonal.
// Partial correlations are -J_ij, i.e. -/+rho alternating with `alternate`.
inline Eigen::MatrixXd chain_precision(int n, double rho, bool alternate = true) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double v = (alternate && i % 2 == 1) ? rho : -rho;
    j(i, i + 1) = j(i + 1, i) = v;
  }
  return j;
}

// Disjoint stars: n/block_size hubs, each tied to its block's members.
inline Eigen::MatrixXd hub_precision(int n, int block_size, double rho) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
  for (int start = 0; start + block_size <= n; start += block_size) {
    for (int k = 1; k < block_size; ++k) {
      const double v = (k % 2 == 0) ? rho : -rho;
      j(start, start + k) = j(start + k, start) = v;
    }
  }
  return j;
}

// Partial correlations from a precision matrix: -J_ij / sqrt(J_ii J_jj).
inline Eigen::MatrixXd partial_corr_from_precision(const Eigen::MatrixXd& j) {
  const Eigen::VectorXd d = j.diagonal().array().sqrt().inverse();
  Eigen::MatrixXd p = -(d.asDiagonal() * j * d.asDiagonal());
  p.diagonal().setZero();
  return p;
}

struct EdgeCounts {
  int tp = 0, fp = 0, fn = 0;
  double f1() const {
    const double denom = 2.0 * tp + fp + fn;
    return denom == 0.0 ? 1.0 : 2.0 * tp / denom;
  }
};

inline EdgeCounts count_edges(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& truth,
                              double tol = 0.0) {
  EdgeCounts c;
  for (int i = 0; i < estimated.rows(); ++i) {
    for (int k = i + 1; k < estimated.cols(); ++k) {
      const bool est = std::abs(estimated(i, k)) > tol;
      const bool real = std::abs(truth(i, k)) > tol;
      if (est && real) ++c.tp;
      if (est && !real) ++c.fp;
      if (!est && real) ++c.fn;
    }
  }
  return c;
}

// Central finite differences.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd hi = x, lo = x;
    hi[i] += h;
    lo[i] -= h;
    g[i] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// ARMA(1,1)-GARCH(1,1) sample path, written directly from the model
// definition (mean-deviation ARMA form).
inline Eigen::VectorXd simulate_arma_garch(double mu, double phi, double psi, double a0, double a1,
                                           double b1, int t_obs, std::uint64_t seed,
                                           int burnin = 500) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int total = t_obs + burnin;
  double h = a0 / (1.0 - a1 - b1);
  double e_prev = 0.0;
  double y_prev = mu;
  Eigen::VectorXd out(t_obs);
  for (int i = 0; i < total; ++i) {
    h = a0 + a1 * e_prev * e_prev + b1 * h;
    const double e = std::sqrt(h) * normal(rng);
    const double y = mu + phi * (y_prev - mu) + psi * e_prev + e;
    e_prev = e;
    y_prev = y;
    if (i >= burnin) out[i - burnin] = y;
  }
  return out;
}

// DCC(1,1) standardized-residual panel: z_t ~ N(0, R_t) with the Q recursion
// driven by the realized z.
inline Eigen::MatrixXd simulate_dcc(double a, double b, const Eigen::MatrixXd& qbar, int t_obs,
                                    std::uint64_t seed, int burnin = 200) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = qbar.rows();
  Eigen::MatrixXd q = qbar;
  Eigen::VectorXd z_prev = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd out(t_obs, n);
  for (int i = 0; i < t_obs + burnin; ++i) {
    if (i > 0) q = (1.0 - a - b) * qbar + a * (z_prev * z_prev.transpose()) + b * q;
    const Eigen::VectorXd d = q.diagonal().array().sqrt().inverse();
    const Eigen::MatrixXd r = d.asDiagonal() * q * d.asDiagonal();
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(r).matrixL();
    Eigen::VectorXd eta(n);
    for (Eigen::Index k = 0; k < n; ++k) eta[k] = normal(rng);
    z_prev = chol * eta;
    if (i >= burnin) out.row(i - burnin) = z_prev.transpose();
  }
  return out;
}

inline Eigen::MatrixXd equicorrelation(int n, double rho) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Constant(n, n, rho);
  q.diagonal().setOnes();
  return q;
}

}  // namespace oracles
