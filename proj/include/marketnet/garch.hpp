#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "marketnet/ingest.hpp"

namespace marketnet {

/// ARMA(1,1)-GARCH(1,1) parameters. The conditional mean is written in
/// mean-deviation form, m_t = mu + phi*(y_{t-1} - mu) + psi*eps_{t-1}, so mu
/// is the unconditional level.
struct ArmaGarchParams {
  double mu = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double alpha0 = 1e-5;  // > 0
  double alpha1 = 0.05;  // >= 0
  double beta1 = 0.90;   // alpha1 + beta1 < 1
  double loglik = 0.0;

  bool admissible() const {
    return alpha0 > 0.0 && alpha1 >= 0.0 && beta1 >= 0.0 && alpha1 + beta1 < 1.0 &&
           std::abs(phi) < 1.0 && std::abs(psi) < 1.0;
  }
};

/// Filtered recursions. Innovations seed at eps_0 = 0; the variance recursion
/// seeds at the sample variance; the likelihood conditions on the first
/// observation (scored from t = 1).
struct GarchFilter {
  Eigen::VectorXd resid;   // eps_t, resid[0] == 0
  Eigen::VectorXd sigma2;  // sigma^2_t
};

GarchFilter arma_garch_filter(const Eigen::VectorXd& y, const ArmaGarchParams& params);

double arma_garch_loglik(const Eigen::VectorXd& y, const ArmaGarchParams& params);

// Gradient in natural parameter order (mu, phi, psi, alpha0, alpha1, beta1),
// from one forward pass of the derivative recursions.
Eigen::VectorXd arma_garch_loglik_grad(const Eigen::VectorXd& y, const ArmaGarchParams& params);

class GarchFitError : public std::runtime_error {
 public:
  GarchFitError(std::string msg, ArmaGarchParams best)
      : std::runtime_error(std::move(msg)), best_iterate(best) {}
  ArmaGarchParams best_iterate;
};

struct GarchOptions {
  int restarts = 3;        // number of fixed starting points (max 5)
  int max_iter = 500;
  double gtol = 1e-6;      // optimizer convergence tolerance
  double stall_tol = 1e-2; // relative gradient norm above which a stall errors
};

// Gaussian QMLE over transformed unconstrained parameters (log for alpha0,
// logistic maps keeping alpha1 + beta1 < 1 and |phi|, |psi| < 1).
ArmaGarchParams fit_arma_garch(const Eigen::VectorXd& y,
                               const std::optional<ArmaGarchParams>& init = {},
                               const GarchOptions& options = {});

struct ResidualSeries {
  Eigen::VectorXd z;      // eps_t / sigma_t for t = 1..T-1
  Eigen::VectorXd sigma;  // sigma_t, aligned with z
  double z_variance = 0.0;
  bool variance_healthy = false;  // sample variance of z within [0.8, 1.2]
  bool all_zero = false;
};

ResidualSeries standardized_residuals(const Eigen::VectorXd& y, const ArmaGarchParams& params);

struct DccFit {
  std::vector<ArmaGarchParams> univariate;  // filled by yearly_correlation
  double a = 0.0;
  double b = 0.0;
  double loglik = 0.0;
  Eigen::MatrixXd Qbar;               // uncentered second moment of Z
  std::vector<Eigen::MatrixXd> Rt;    // conditional correlation path
  Eigen::MatrixXd Rmean;              // time average of Rt
};

// Correlation path and correlation-part quasi-likelihood for fixed (a, b):
// Q_t = (1-a-b)*Qbar + a*z_{t-1} z_{t-1}' + b*Q_{t-1}, Q_0 = Qbar,
// R_t = diag(Q_t)^{-1/2} Q_t diag(Q_t)^{-1/2}.
struct DccPath {
  std::vector<Eigen::MatrixXd> Rt;
  double loglik = 0.0;
};

DccPath dcc_path(const Eigen::MatrixXd& z, const Eigen::MatrixXd& qbar, double a, double b);

struct DccOptions {
  int restarts = 3;
  int max_iter = 300;
  double gtol = 1e-6;
};

// Second-stage QMLE over (a, b) on standardized residuals.
DccFit fit_dcc(const Eigen::MatrixXd& z, const DccOptions& options = {});

enum class CorrelationSource { kRmean, kLast, kUnconditional };

struct YearlyCorrelationOptions {
  GarchOptions garch;
  DccOptions dcc;
  CorrelationSource source = CorrelationSource::kRmean;
  int threads = 0;
};

struct YearlyCorrelation {
  Eigen::MatrixXd C;  // symmetric, unit diagonal, PSD
  std::vector<std::string> tickers;
  std::vector<std::string> sectors;
  std::vector<std::string> dropped;   // columns whose univariate fit failed
  std::vector<std::string> warnings;
  DccFit fit;
};

YearlyCorrelation yearly_correlation(const ReturnsPanel& panel,
                                     const YearlyCorrelationOptions& options = {});

struct MuRow {
  std::string ticker;
  std::string mu;  // 4-decimal formatting
};

std::vector<MuRow> mu_table(const std::vector<ArmaGarchParams>& fits,
                            const std::vector<std::string>& tickers);

}  // namespace marketnet
