#include "marketnet/garch.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "marketnet/optim.hpp"
#include "marketnet/spectral.hpp"
#include "marketnet/util.hpp"

namespace marketnet {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double sample_mean(const Eigen::VectorXd& y) { return y.mean(); }

double sample_var(const Eigen::VectorXd& y) {
  const double m = y.mean();
  return (y.array() - m).square().sum() / static_cast<double>(y.size());
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Natural <-> unconstrained parameter maps. Order: mu, phi, psi, a0, a1, b1.
Eigen::VectorXd to_unconstrained(const ArmaGarchParams& p) {
  Eigen::VectorXd u(6);
  u[0] = p.mu;
  u[1] = std::atanh(std::clamp(p.phi, -0.999999, 0.999999));
  u[2] = std::atanh(std::clamp(p.psi, -0.999999, 0.999999));
  u[3] = std::log(p.alpha0);
  const double s = std::clamp(p.alpha1 + p.beta1, 1e-8, 1.0 - 1e-8);
  const double w = std::clamp(p.alpha1 / s, 1e-8, 1.0 - 1e-8);
  u[4] = logit(s);
  u[5] = logit(w);
  return u;
}

ArmaGarchParams from_unconstrained(const Eigen::VectorXd& u) {
  ArmaGarchParams p;
  p.mu = u[0];
  p.phi = std::tanh(u[1]);
  p.psi = std::tanh(u[2]);
  p.alpha0 = std::exp(u[3]);
  const double s = sigmoid(u[4]);
  const double w = sigmoid(u[5]);
  p.alpha1 = s * w;
  p.beta1 = s * (1.0 - w);
  return p;
}

// Chain rule: grad_u = (dtheta/du)^T grad_theta.
Eigen::VectorXd chain_to_unconstrained(const Eigen::VectorXd& grad_theta,
                                       const Eigen::VectorXd& u) {
  const double phi = std::tanh(u[1]);
  const double psi = std::tanh(u[2]);
  const double a0 = std::exp(u[3]);
  const double s = sigmoid(u[4]);
  const double w = sigmoid(u[5]);
  Eigen::VectorXd g(6);
  g[0] = grad_theta[0];
  g[1] = grad_theta[1] * (1.0 - phi * phi);
  g[2] = grad_theta[2] * (1.0 - psi * psi);
  g[3] = grad_theta[3] * a0;
  g[4] = (grad_theta[4] * w + grad_theta[5] * (1.0 - w)) * s * (1.0 - s);
  g[5] = (grad_theta[4] - grad_theta[5]) * s * w * (1.0 - w);
  return g;
}

}  // namespace

GarchFilter arma_garch_filter(const Eigen::VectorXd& y, const ArmaGarchParams& p) {
  const auto t = y.size();
  if (t < 2) throw std::invalid_argument("series too short");
  GarchFilter f;
  f.resid.resize(t);
  f.sigma2.resize(t);
  f.resid[0] = 0.0;
  f.sigma2[0] = sample_var(y);
  for (Eigen::Index i = 1; i < t; ++i) {
    const double m = p.mu + p.phi * (y[i - 1] - p.mu) + p.psi * f.resid[i - 1];
    f.resid[i] = y[i] - m;
    f.sigma2[i] = p.alpha0 + p.alpha1 * f.resid[i - 1] * f.resid[i - 1] + p.beta1 * f.sigma2[i - 1];
  }
  return f;
}

double arma_garch_loglik(const Eigen::VectorXd& y, const ArmaGarchParams& p) {
  const auto f = arma_garch_filter(y, p);
  double ll = 0.0;
  for (Eigen::Index i = 1; i < y.size(); ++i) {
    const double h = f.sigma2[i];
    if (!(h > 0.0) || !std::isfinite(h)) return -std::numeric_limits<double>::infinity();
    ll -= 0.5 * (kLog2Pi + std::log(h) + f.resid[i] * f.resid[i] / h);
  }
  return ll;
}

Eigen::VectorXd arma_garch_loglik_grad(const Eigen::VectorXd& y, const ArmaGarchParams& p) {
  const auto t = y.size();
  double e_prev = 0.0, h_prev = sample_var(y);
  // Derivatives of (eps, sigma^2) wrt (mu, phi, psi, a0, a1, b1).
  Eigen::VectorXd de_prev = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd dh_prev = Eigen::VectorXd::Zero(6);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(6);

  for (Eigen::Index i = 1; i < t; ++i) {
    Eigen::VectorXd dm = Eigen::VectorXd::Zero(6);
    dm[0] = 1.0 - p.phi;
    dm[1] = y[i - 1] - p.mu;
    dm[2] = e_prev;
    dm += p.psi * de_prev;
    const double m = p.mu + p.phi * (y[i - 1] - p.mu) + p.psi * e_prev;
    const double e = y[i] - m;
    const Eigen::VectorXd de = -dm;

    Eigen::VectorXd dh = Eigen::VectorXd::Zero(6);
    dh[3] = 1.0;
    dh[4] = e_prev * e_prev;
    dh[5] = h_prev;
    dh += 2.0 * p.alpha1 * e_prev * de_prev + p.beta1 * dh_prev;
    const double h = p.alpha0 + p.alpha1 * e_prev * e_prev + p.beta1 * h_prev;

    grad += -(e / h) * de - 0.5 * (1.0 / h - e * e / (h * h)) * dh;

    e_prev = e;
    h_prev = h;
    de_prev = de;
    dh_prev = dh;
  }
  return grad;
}

ArmaGarchParams fit_arma_garch(const Eigen::VectorXd& y,
                               const std::optional<ArmaGarchParams>& init,
                               const GarchOptions& options) {
  if (y.size() < 50) throw std::invalid_argument("series too short (need T >= 50)");
  const double var = sample_var(y);
  if (var <= 0.0 || (y.array() == y[0]).all())
    throw std::invalid_argument("constant series");
  const double mean = sample_mean(y);

  std::vector<ArmaGarchParams> starts;
  auto add_start = [&](double phi, double psi, double a0_frac, double a1, double b1) {
    ArmaGarchParams p;
    p.mu = mean;
    p.phi = phi;
    p.psi = psi;
    p.alpha0 = a0_frac * var;
    p.alpha1 = a1;
    p.beta1 = b1;
    starts.push_back(p);
  };
  // Near-iid start first: on flat likelihood ridges ties resolve toward it.
  add_start(0.0, 0.0, 0.96, 0.01, 0.01);
  add_start(0.0, 0.0, 0.05, 0.05, 0.90);
  add_start(0.1, 0.1, 0.20, 0.10, 0.70);
  add_start(0.0, 0.0, 0.30, 0.20, 0.50);
  add_start(-0.1, 0.1, 0.10, 0.02, 0.95);
  starts.resize(std::min<std::size_t>(starts.size(), std::max(options.restarts, 1)));
  if (init) {
    if (!init->admissible()) throw std::invalid_argument("inadmissible initial parameters");
    starts.insert(starts.begin(), *init);
  }

  const auto objective = [&](const Eigen::VectorXd& u) {
    return arma_garch_loglik(y, from_unconstrained(u));
  };
  const auto gradient = [&](const Eigen::VectorXd& u) {
    return chain_to_unconstrained(arma_garch_loglik_grad(y, from_unconstrained(u)), u);
  };

  BfgsOptions bopt;
  bopt.max_iter = options.max_iter;
  bopt.gtol = options.gtol;
  bool have_best = false, any_converged = false;
  BfgsResult best;
  for (const auto& start : starts) {
    auto res = bfgs_maximize(objective, gradient, to_unconstrained(start), bopt);
    any_converged = any_converged || res.converged;
    if (!have_best || res.f > best.f + 1e-7 * (1.0 + std::abs(best.f))) {
      best = std::move(res);
      have_best = true;
    }
  }

  ArmaGarchParams fitted = from_unconstrained(best.x);
  fitted.loglik = best.f;
  if (!any_converged &&
      best.grad.cwiseAbs().maxCoeff() > options.stall_tol * (1.0 + std::abs(best.f)))
    throw GarchFitError("optimizer stall: gradient norm above tolerance after restarts", fitted);
  return fitted;
}

ResidualSeries standardized_residuals(const Eigen::VectorXd& y, const ArmaGarchParams& params) {
  const auto f = arma_garch_filter(y, params);
  const auto t = y.size();
  ResidualSeries out;
  out.z.resize(t - 1);
  out.sigma.resize(t - 1);
  for (Eigen::Index i = 1; i < t; ++i) {
    const double h = f.sigma2[i];
    if (!(h > 1e-300)) throw std::runtime_error("variance collapse");
    out.sigma[i - 1] = std::sqrt(h);
    out.z[i - 1] = f.resid[i] / out.sigma[i - 1];
  }
  out.all_zero = out.z.cwiseAbs().maxCoeff() == 0.0;
  out.z_variance = sample_var(out.z);
  out.variance_healthy = out.z_variance >= 0.8 && out.z_variance <= 1.2;
  return out;
}

DccPath dcc_path(const Eigen::MatrixXd& z, const Eigen::MatrixXd& qbar, double a, double b) {
  const auto t = z.rows();
  const auto n = z.cols();
  DccPath out;
  out.Rt.reserve(static_cast<std::size_t>(t));
  Eigen::MatrixXd q = qbar;  // Q_0
  Eigen::MatrixXd q_next(n, n);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < t; ++i) {
    if (i > 0) {
      q_next = (1.0 - a - b) * qbar + b * q;
      q_next.noalias() += a * (z.row(i - 1).transpose() * z.row(i - 1));
      q.swap(q_next);
    }
    const Eigen::VectorXd d = q.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd r = d.asDiagonal() * q * d.asDiagonal();
    r.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) {
      out.loglik = -std::numeric_limits<double>::infinity();
      out.Rt.clear();
      return out;
    }
    const Eigen::VectorXd zi = z.row(i).transpose();
    const Eigen::VectorXd solved = llt.solve(zi);
    double logdet = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
    ll -= 0.5 * (logdet + zi.dot(solved) - zi.squaredNorm());
    out.Rt.push_back(std::move(r));
  }
  out.loglik = ll;
  return out;
}

namespace {

std::pair<double, double> dcc_from_unconstrained(const Eigen::VectorXd& u) {
  const double s = sigmoid(u[0]);
  const double w = sigmoid(u[1]);
  return {s * w, s * (1.0 - w)};
}

Eigen::VectorXd dcc_to_unconstrained(double a, double b) {
  const double s = std::clamp(a + b, 1e-8, 1.0 - 1e-8);
  const double w = std::clamp(a / s, 1e-8, 1.0 - 1e-8);
  Eigen::VectorXd u(2);
  u[0] = logit(s);
  u[1] = logit(w);
  return u;
}

}  // namespace

DccFit fit_dcc(const Eigen::MatrixXd& z, const DccOptions& options) {
  const auto t = z.rows();
  const auto n = z.cols();
  if (n < 2) throw std::invalid_argument("DCC needs at least two series");
  if (t < 10) throw std::invalid_argument("DCC needs more observations");
  for (Eigen::Index j = 0; j < n; ++j)
    if (sample_var(z.col(j)) <= 0.0)
      throw std::invalid_argument("constant residual column " + std::to_string(j));

  DccFit fit;
  fit.Qbar = (z.transpose() * z) / static_cast<double>(t);

  const auto objective = [&](const Eigen::VectorXd& u) {
    const auto [a, b] = dcc_from_unconstrained(u);
    return dcc_path(z, fit.Qbar, a, b).loglik;
  };
  const auto gradient = [&](const Eigen::VectorXd& u) {
    // Two parameters: central differences are exact enough and cheap.
    constexpr double h = 1e-6;
    Eigen::VectorXd g(2);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd hi = u, lo = u;
      hi[i] += h;
      lo[i] -= h;
      g[i] = (objective(hi) - objective(lo)) / (2.0 * h);
    }
    return g;
  };

  const std::vector<std::pair<double, double>> starts = {
      {0.05, 0.90}, {0.02, 0.95}, {0.10, 0.80}, {0.01, 0.50}, {0.15, 0.60}};
  const auto n_starts =
      std::min<std::size_t>(starts.size(), static_cast<std::size_t>(std::max(options.restarts, 1)));
  BfgsOptions bopt;
  bopt.max_iter = options.max_iter;
  bopt.gtol = options.gtol;
  bool have_best = false;
  BfgsResult best;
  for (std::size_t i = 0; i < n_starts; ++i) {
    auto res = bfgs_maximize(objective, gradient,
                             dcc_to_unconstrained(starts[i].first, starts[i].second), bopt);
    if (!have_best || res.f > best.f + 1e-9 * (1.0 + std::abs(best.f))) {
      best = std::move(res);
      have_best = true;
    }
  }
  if (!have_best || !std::isfinite(best.f)) throw std::runtime_error("DCC optimizer failure");

  const auto [a, b] = dcc_from_unconstrained(best.x);
  if (a + b >= 1.0 - 1e-6) throw std::runtime_error("non-stationary DCC (a + b at boundary)");
  fit.a = a;
  fit.b = b;
  auto path = dcc_path(z, fit.Qbar, a, b);
  fit.loglik = path.loglik;
  fit.Rt = std::move(path.Rt);
  fit.Rmean = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : fit.Rt) fit.Rmean += r;
  fit.Rmean /= static_cast<double>(fit.Rt.size());
  fit.Rmean.diagonal().setOnes();
  return fit;
}

YearlyCorrelation yearly_correlation(const ReturnsPanel& panel,
                                     const YearlyCorrelationOptions& options) {
  const auto t = panel.returns.rows();
  const auto n = panel.returns.cols();
  if (n < 2) throw std::invalid_argument("panel needs at least two tickers");

  std::vector<std::optional<ArmaGarchParams>> fits(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t j) {
    try {
      fits[j] = fit_arma_garch(panel.returns.col(static_cast<Eigen::Index>(j)), std::nullopt,
                               options.garch);
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  });

  YearlyCorrelation out;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (fits[static_cast<std::size_t>(j)]) {
      kept.push_back(j);
      out.tickers.push_back(panel.tickers[static_cast<std::size_t>(j)]);
      out.sectors.push_back(panel.sectors[static_cast<std::size_t>(j)]);
    } else {
      out.dropped.push_back(panel.tickers[static_cast<std::size_t>(j)]);
      out.warnings.push_back("dropped " + panel.tickers[static_cast<std::size_t>(j)] + ": " +
                             errors[static_cast<std::size_t>(j)]);
    }
  }
  if (kept.size() < 2) throw std::runtime_error("fewer than two series survived univariate fits");

  Eigen::MatrixXd z(t - 1, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const auto j = kept[c];
    const auto resid =
        standardized_residuals(panel.returns.col(j), *fits[static_cast<std::size_t>(j)]);
    if (!resid.variance_healthy)
      out.warnings.push_back("residual variance health check failed for " +
                             panel.tickers[static_cast<std::size_t>(j)] + " (var " +
                             fmt_fixed(resid.z_variance, 3) + ")");
    z.col(static_cast<Eigen::Index>(c)) = resid.z;
    out.fit.univariate.push_back(*fits[static_cast<std::size_t>(j)]);
  }

  auto dcc = fit_dcc(z, options.dcc);
  dcc.univariate = std::move(out.fit.univariate);
  out.fit = std::move(dcc);

  switch (options.source) {
    case CorrelationSource::kRmean:
      out.C = out.fit.Rmean;
      break;
    case CorrelationSource::kLast:
      out.C = out.fit.Rt.back();
      break;
    case CorrelationSource::kUnconditional: {
      const Eigen::VectorXd d = out.fit.Qbar.diagonal().array().sqrt().inverse();
      out.C = d.asDiagonal() * out.fit.Qbar * d.asDiagonal();
      out.C.diagonal().setOnes();
      break;
    }
  }
  out.C = 0.5 * (out.C + out.C.transpose());

  // PSD cleanup: tiny negative eigenvalues are rounding, clip and renormalize.
  const auto eig = jacobi_eigen(out.C);
  if (eig.values.minCoeff() < 0.0) {
    const Eigen::VectorXd clipped = eig.values.cwiseMax(0.0);
    out.C = eig.vectors * clipped.asDiagonal() * eig.vectors.transpose();
    const Eigen::VectorXd d = out.C.diagonal().array().max(1e-300).sqrt().inverse();
    out.C = d.asDiagonal() * out.C * d.asDiagonal();
    out.C = 0.5 * (out.C + out.C.transpose());
    out.C.diagonal().setOnes();
  }
  return out;
}

std::vector<MuRow> mu_table(const std::vector<ArmaGarchParams>& fits,
                            const std::vector<std::string>& tickers) {
  if (fits.size() != tickers.size()) throw std::invalid_argument("fits/tickers size mismatch");
  std::vector<MuRow> rows;
  rows.reserve(fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i)
    rows.push_back({tickers[i], fmt_fixed(fits[i].mu, 4)});
  return rows;
}

}  // namespace marketnet
