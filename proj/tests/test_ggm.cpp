#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "marketnet/ggm.hpp"
#include "marketnet/lasso.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace marketnet;

namespace {

ReturnsPanel panel_from_matrix(const Eigen::MatrixXd& returns) {
  ReturnsPanel p;
  p.returns = returns;
  for (Eigen::Index j = 0; j < returns.cols(); ++j) {
    p.tickers.push_back("T" + std::to_string(j));
    p.sectors.push_back("unknown");
  }
  for (Eigen::Index t = 0; t < returns.rows(); ++t)
    p.dates.push_back(Date{2006, static_cast<int>(t) / 28 + 1, static_cast<int>(t) % 28 + 1});
  return p;
}

NodewiseFit fit_with_betas(int node, const Eigen::VectorXd& betas, double resid_var = 0.5) {
  NodewiseFit f;
  f.node = node;
  f.betas = betas;
  f.residual_variance = resid_var;
  return f;
}

}  // namespace

TEST_CASE("standardize leaves a standard column unchanged") {
  Eigen::MatrixXd m(4, 1);
  m << -1.0, 1.0, -1.0, 1.0;  // mean 0, population variance 1
  const auto s = standardize(panel_from_matrix(m));
  CHECK((s.panel.returns - m).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(s.means[0] == doctest::Approx(0.0));
  CHECK(s.sds[0] == doctest::Approx(1.0));
}

TEST_CASE("standardize maps (0, 2) to (-1, 1) under the population convention") {
  Eigen::MatrixXd m(2, 1);
  m << 0.0, 2.0;
  const auto s = standardize(panel_from_matrix(m));
  CHECK(s.panel.returns(0, 0) == doctest::Approx(-1.0));
  CHECK(s.panel.returns(1, 0) == doctest::Approx(1.0));
  CHECK(s.means[0] == doctest::Approx(1.0));
  CHECK(s.sds[0] == doctest::Approx(1.0));
}

TEST_CASE("standardize moments check out on a random panel") {
  const auto m = testutil::random_matrix(60, 4, 11) * 3.0;
  const auto s = standardize(panel_from_matrix(m));
  for (int j = 0; j < 4; ++j) {
    const auto col = s.panel.returns.col(j);
    CHECK(std::abs(col.mean()) < 1e-12);
    CHECK(col.squaredNorm() / 60.0 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("standardize rejects zero-variance columns") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(10, 2);
  m.col(0) = testutil::random_matrix(10, 1, 12);
  CHECK_THROWS_AS(standardize(panel_from_matrix(m)), std::runtime_error);
}

TEST_CASE("independent columns give empty beta vectors with high probability") {
  int clean = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto m = testutil::random_matrix(200, 2, 700 + seed);
    const auto s = standardize(panel_from_matrix(m));
    const auto fits = nodewise_estimate(s.panel);
    if (fits[0].betas.cwiseAbs().maxCoeff() == 0.0 &&
        fits[1].betas.cwiseAbs().maxCoeff() == 0.0)
      ++clean;
  }
  CHECK(clean >= seeds * 9 / 10);
}

TEST_CASE("chain-graph neighbours get nonzero betas") {
  const auto j = oracles::chain_precision(8, 0.45, false);
  const Eigen::MatrixXd sigma = j.inverse();
  const auto x = oracles::sample_mvn(sigma, 2000, 99);
  const auto s = standardize(panel_from_matrix(x));
  const auto fits = nodewise_estimate(s.panel);
  for (int i = 0; i + 1 < 8; ++i) {
    CHECK(fits[static_cast<std::size_t>(i)].betas[i + 1] != 0.0);
    CHECK(fits[static_cast<std::size_t>(i + 1)].betas[i] != 0.0);
  }
}

TEST_CASE("two perfectly correlated columns select each other") {
  Eigen::MatrixXd m(100, 2);
  m.col(0) = testutil::random_matrix(100, 1, 13);
  m.col(1) = 2.0 * m.col(0);
  const auto s = standardize(panel_from_matrix(m));
  const auto fits = nodewise_estimate(s.panel);
  CHECK(fits[0].betas[1] != 0.0);
  CHECK(fits[1].betas[0] != 0.0);
}

TEST_CASE("AND rule drops one-sided edges") {
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(2), b1 = Eigen::VectorXd::Zero(2);
  b0[1] = 0.5;  // only node 0 selects node 1
  const auto net = combine_and_rule({fit_with_betas(0, b0), fit_with_betas(1, b1)});
  CHECK(net.P(0, 1) == 0.0);
  CHECK(net.sign_conflicts == 0);
}

TEST_CASE("symmetric betas give their common value as the edge weight") {
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(2), b1 = Eigen::VectorXd::Zero(2);
  b0[1] = 0.25;
  b1[0] = 0.25;
  const auto net = combine_and_rule({fit_with_betas(0, b0), fit_with_betas(1, b1)});
  CHECK(net.P(0, 1) == doctest::Approx(0.25));
  CHECK(net.P(1, 0) == doctest::Approx(0.25));
  CHECK(net.P(0, 0) == 0.0);
}

TEST_CASE("sign conflicts drop the edge and are counted") {
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(2), b1 = Eigen::VectorXd::Zero(2);
  b0[1] = 0.25;
  b1[0] = -0.25;
  const auto net = combine_and_rule({fit_with_betas(0, b0), fit_with_betas(1, b1)});
  CHECK(net.P(0, 1) == 0.0);
  CHECK(net.sign_conflicts == 1);
}

TEST_CASE("network is symmetric, hollow, and clipped into [-1, 1]") {
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(3), b1 = Eigen::VectorXd::Zero(3),
                  b2 = Eigen::VectorXd::Zero(3);
  b0[1] = 1.5;
  b1[0] = 1.4;  // product > 1 -> clipped
  b0[2] = -0.2;
  b2[0] = -0.3;
  const auto net = combine_and_rule({fit_with_betas(0, b0), fit_with_betas(1, b1),
                                     fit_with_betas(2, b2)});
  CHECK(net.P(0, 1) == 1.0);
  CHECK(net.clipped == 1);
  CHECK(net.P(0, 2) == doctest::Approx(-std::sqrt(0.06)));
  CHECK((net.P - net.P.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(net.P.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(net.P.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("AND-rule edge set is contained in each node's support") {
  const auto j = oracles::chain_precision(10, 0.4);
  const auto x = oracles::sample_mvn(j.inverse(), 400, 55);
  const auto s = standardize(panel_from_matrix(x));
  const auto fits = nodewise_estimate(s.panel);
  const auto net = combine_and_rule(fits);
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b)
      if (net.P(a, b) != 0.0) {
        CHECK(fits[static_cast<std::size_t>(a)].betas[b] != 0.0);
        CHECK(fits[static_cast<std::size_t>(b)].betas[a] != 0.0);
      }
}

TEST_CASE("unregularized 3x3 network matches the inversion oracle at large T") {
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1.0, 0.5, 0.2,  //
      0.5, 1.0, 0.3,       //
      0.2, 0.3, 1.0;
  const auto x = oracles::sample_mvn(sigma, 100000, 77);
  const auto s = standardize(panel_from_matrix(x));

  // lambda -> 0: solve each nodewise regression unpenalized.
  std::vector<NodewiseFit> fits;
  for (int i = 0; i < 3; ++i) {
    Eigen::MatrixXd xi(x.rows(), 2);
    int c = 0;
    for (int a = 0; a < 3; ++a)
      if (a != i) xi.col(c++) = s.panel.returns.col(a);
    const Eigen::VectorXd beta = lasso_cd(xi, s.panel.returns.col(i), 0.0, 1e-12);
    NodewiseFit f;
    f.node = i;
    f.betas = Eigen::VectorXd::Zero(3);
    c = 0;
    for (int a = 0; a < 3; ++a)
      if (a != i) f.betas[a] = beta[c++];
    const Eigen::VectorXd resid = s.panel.returns.col(i) - xi * beta;
    f.residual_variance = resid.squaredNorm() / static_cast<double>(x.rows());
    fits.push_back(std::move(f));
  }
  const auto net = combine_and_rule(fits);

  // Oracle: partial correlations from inverting the sample covariance.
  const Eigen::MatrixXd sample_cov =
      s.panel.returns.transpose() * s.panel.returns / static_cast<double>(x.rows());
  const auto oracle = oracles::partial_corr_from_precision(sample_cov.inverse());
  CHECK((net.P - oracle).cwiseAbs().maxCoeff() < 1e-3);

  SUBCASE("concentration matrix approximately inverts the covariance") {
    const auto conc = concentration_from_fits(fits);
    const Eigen::MatrixXd prod = conc.J * sample_cov;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        CHECK(std::abs(prod(a, b) - (a == b ? 1.0 : 0.0)) < 0.05);
  }
}

TEST_CASE("concentration matrix of independent standardized columns is near identity") {
  const auto x = oracles::sample_mvn(Eigen::MatrixXd::Identity(4, 4), 5000, 101);
  const auto s = standardize(panel_from_matrix(x));
  const auto fits = nodewise_estimate(s.panel);
  const auto conc = concentration_from_fits(fits);
  for (int i = 0; i < 4; ++i) CHECK(conc.J(i, i) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("zero network gives a diagonal concentration matrix") {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
  const auto conc = concentration_from_fits(
      {fit_with_betas(0, b, 0.5), fit_with_betas(1, b, 0.25), fit_with_betas(2, b, 1.0)});
  CHECK(conc.J(0, 0) == doctest::Approx(2.0));
  CHECK(conc.J(1, 1) == doctest::Approx(4.0));
  CHECK(conc.J(2, 2) == doctest::Approx(1.0));
  CHECK(conc.J(0, 1) == 0.0);
}

TEST_CASE("perfectly predicted node is an error for the concentration matrix") {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_WITH_AS(
      concentration_from_fits({fit_with_betas(0, b, 0.0), fit_with_betas(1, b, 0.5)}),
      doctest::Contains("perfectly predicted"), std::runtime_error);
}

TEST_CASE("support recovery on a chain graph is strong (smoke version)") {
  double f1_sum = 0.0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto j = oracles::chain_precision(20, 0.3);
    const auto x = oracles::sample_mvn(j.inverse(), 250, 900 + seed);
    const auto est = estimate_ggm(panel_from_matrix(x));
    const auto truth = oracles::partial_corr_from_precision(j);
    f1_sum += oracles::count_edges(est.network.P, truth).f1();
  }
  CHECK(f1_sum / seeds >= 0.75);
}

TEST_CASE("degenerate n > T panels are permitted and flagged") {
  const auto x = oracles::sample_mvn(Eigen::MatrixXd::Identity(12, 12), 10, 31);
  const auto est = estimate_ggm(panel_from_matrix(x));
  CHECK(est.degenerate_n_gt_t);
  CHECK(est.network.P.rows() == 12);
}
