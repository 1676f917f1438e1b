#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "marketnet/ingest.hpp"

namespace marketnet {

struct StandardizedPanel {
  ReturnsPanel panel;     // each column: mean 0, population variance 1
  Eigen::VectorXd means;
  Eigen::VectorXd sds;    // population standard deviations (1/T convention)
};

// Population scaling: sd = sqrt(mean((x - mean)^2)), so (0, 2) maps to (-1, 1).
StandardizedPanel standardize(const ReturnsPanel& returns);

/// One nodewise lasso regression: column `node` on all other columns.
struct NodewiseFit {
  int node = 0;
  double intercept = 0.0;          // mean of the regressed column as given
  Eigen::VectorXd betas;           // length n, betas[node] == 0
  double residual_variance = 0.0;  // RSS/T at the selected penalty
  double lambda = 0.0;
};

struct GgmParams {
  double gamma = 0.25;     // EBIC weight
  int grid_size = 50;
  double grid_ratio = 0.01;  // grid spans [ratio*lambda_max, lambda_max]
  double tol = 1e-7;
  int max_iter = 100000;
  int threads = 0;
};

// One fit per node, penalties chosen by EBIC along a warm-started path.
// Fits are independent and run in parallel over nodes.
std::vector<NodewiseFit> nodewise_estimate(const ReturnsPanel& standardized,
                                           const GgmParams& params = {});

/// Partial-correlation adjacency matrix (symmetric, hollow, entries in [-1,1]).
struct PartialCorrNetwork {
  Eigen::MatrixXd P;
  std::vector<std::string> tickers;
  std::vector<std::string> sectors;
  int year = 0;
  int sign_conflicts = 0;  // edges dropped because the two betas disagree in sign
  int clipped = 0;         // entries clipped into [-1, 1]
};

// AND rule: edge (i,j) kept iff both betas are nonzero; weight is the
// sign-checked geometric mean of the two betas, which equals the partial
// correlation when both regressions are exact.
PartialCorrNetwork combine_and_rule(const std::vector<NodewiseFit>& fits,
                                    std::vector<std::string> tickers = {},
                                    std::vector<std::string> sectors = {}, int year = 0);

struct ConcentrationMatrix {
  Eigen::MatrixXd J;  // symmetric, diagonal 1/var(eps_i)
};

ConcentrationMatrix concentration_from_fits(const std::vector<NodewiseFit>& fits);

/// Full per-year estimate: standardize, nodewise fits, AND-rule combination.
struct GgmEstimate {
  std::vector<NodewiseFit> fits;
  PartialCorrNetwork network;
  bool degenerate_n_gt_t = false;  // more nodes than observations (permitted)
};

GgmEstimate estimate_ggm(const ReturnsPanel& returns, const GgmParams& params = {}, int year = 0);

}  // namespace marketnet
