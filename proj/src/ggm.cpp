#include "marketnet/ggm.hpp"

#include <cmath>
#include <stdexcept>

#include "marketnet/lasso.hpp"
#include "marketnet/util.hpp"

namespace marketnet {

StandardizedPanel standardize(const ReturnsPanel& returns) {
  const auto t = returns.returns.rows();
  const auto n = returns.returns.cols();
  if (t < 2) throw std::invalid_argument("standardize needs at least two observations");
  StandardizedPanel out;
  out.panel = returns;
  out.means.resize(n);
  out.sds.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mean = returns.returns.col(j).mean();
    const double var =
        (returns.returns.col(j).array() - mean).square().sum() / static_cast<double>(t);
    if (var <= 0.0)
      throw std::runtime_error("zero-variance column '" +
                               returns.tickers[static_cast<std::size_t>(j)] +
                               "' (variance filter violated upstream)");
    out.means[j] = mean;
    out.sds[j] = std::sqrt(var);
    out.panel.returns.col(j) = (returns.returns.col(j).array() - mean) / out.sds[j];
  }
  return out;
}

std::vector<NodewiseFit> nodewise_estimate(const ReturnsPanel& standardized,
                                           const GgmParams& params) {
  const auto t = standardized.returns.rows();
  const auto n = standardized.returns.cols();
  if (n < 2) throw std::invalid_argument("nodewise estimation needs at least two nodes");
  const double t_d = static_cast<double>(t);
  // Shared second moments; each node's subproblem is carved out of this.
  const Eigen::MatrixXd gram_full = (standardized.returns.transpose() * standardized.returns) / t_d;

  std::vector<NodewiseFit> fits(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), params.threads, [&](std::size_t node) {
    const auto i = static_cast<Eigen::Index>(node);
    const Eigen::Index p = n - 1;
    Eigen::MatrixXd gram(p, p);
    Eigen::VectorXd xty(p);
    for (Eigen::Index a = 0, ra = 0; a < n; ++a) {
      if (a == i) continue;
      xty[ra] = gram_full(a, i);
      for (Eigen::Index b = 0, rb = 0; b < n; ++b) {
        if (b == i) continue;
        gram(ra, rb) = gram_full(a, b);
        ++rb;
      }
      ++ra;
    }
    const double y_var = gram_full(i, i);
    const auto grid = lambda_grid(lasso_lambda_max(xty), params.grid_size, params.grid_ratio);
    const auto path =
        fit_lasso_path(gram, xty, y_var, t, grid, params.gamma, params.tol, params.max_iter);
    const auto& best = path.points[path.best];

    NodewiseFit fit;
    fit.node = static_cast<int>(i);
    fit.intercept = standardized.returns.col(i).mean();
    fit.lambda = best.lambda;
    fit.residual_variance = best.rss_over_t;
    fit.betas = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0, ra = 0; a < n; ++a) {
      if (a == i) continue;
      fit.betas[a] = best.beta[ra++];
    }
    fits[node] = std::move(fit);
  });
  return fits;
}

PartialCorrNetwork combine_and_rule(const std::vector<NodewiseFit>& fits,
                                    std::vector<std::string> tickers,
                                    std::vector<std::string> sectors, int year) {
  const auto n = static_cast<Eigen::Index>(fits.size());
  if (n == 0) throw std::invalid_argument("no nodewise fits given");
  for (const auto& fit : fits)
    if (fit.betas.size() != n) throw std::invalid_argument("fit does not cover all nodes");

  PartialCorrNetwork net;
  net.year = year;
  net.P = Eigen::MatrixXd::Zero(n, n);
  if (tickers.empty())
    for (Eigen::Index i = 0; i < n; ++i) tickers.push_back("N" + std::to_string(i));
  if (sectors.empty()) sectors.assign(static_cast<std::size_t>(n), "unknown");
  net.tickers = std::move(tickers);
  net.sectors = std::move(sectors);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double bij = fits[static_cast<std::size_t>(i)].betas[j];
      const double bji = fits[static_cast<std::size_t>(j)].betas[i];
      if (bij == 0.0 || bji == 0.0) continue;
      if ((bij > 0) != (bji > 0)) {
        ++net.sign_conflicts;
        continue;
      }
      double rho = (bij > 0 ? 1.0 : -1.0) * std::sqrt(bij * bji);
      if (std::abs(rho) > 1.0) {
        rho = rho > 0 ? 1.0 : -1.0;
        ++net.clipped;
      }
      net.P(i, j) = net.P(j, i) = rho;
    }
  }
  return net;
}

ConcentrationMatrix concentration_from_fits(const std::vector<NodewiseFit>& fits) {
  const auto net = combine_and_rule(fits);
  const auto n = net.P.rows();
  Eigen::VectorXd jdiag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double var = fits[static_cast<std::size_t>(i)].residual_variance;
    if (var < 1e-12) throw std::runtime_error("perfectly predicted node " + std::to_string(i));
    jdiag[i] = 1.0 / var;
  }
  ConcentrationMatrix out;
  out.J = Eigen::MatrixXd::Zero(n, n);
  out.J.diagonal() = jdiag;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      out.J(i, j) = out.J(j, i) = -net.P(i, j) * std::sqrt(jdiag[i] * jdiag[j]);
  return out;
}

GgmEstimate estimate_ggm(const ReturnsPanel& returns, const GgmParams& params, int year) {
  const auto standardized = standardize(returns);
  GgmEstimate out;
  out.degenerate_n_gt_t = returns.returns.cols() > returns.returns.rows();
  out.fits = nodewise_estimate(standardized.panel, params);
  out.network = combine_and_rule(out.fits, returns.tickers, returns.sectors, year);
  return out;
}

}  // namespace marketnet
