#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "marketnet/community.hpp"
#include "support/testutil.hpp"

using namespace marketnet;

namespace {

// Two equicorrelated blocks with a common cross-block level.
Eigen::MatrixXd two_block_corr(int block, double within, double cross) {
  const int n = 2 * block;
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, cross);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((i < block) == (j < block)) c(i, j) = within;
  c.diagonal().setOnes();
  return c;
}

std::vector<int> block_split(int block) {
  std::vector<int> s(static_cast<std::size_t>(2 * block), 0);
  for (int i = block; i < 2 * block; ++i) s[static_cast<std::size_t>(i)] = 1;
  return s;
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

RmtDecomposition passthrough_decomposition(const Eigen::MatrixXd& c) {
  RmtDecomposition d;
  const auto n = c.rows();
  d.Cr = Eigen::MatrixXd::Zero(n, n);
  d.Cg = Eigen::MatrixXd::Zero(n, n);
  d.Cm = Eigen::MatrixXd::Zero(n, n);
  d.Cs = c;  // objective sees the matrix as-is
  d.has_group = false;
  return d;
}

}  // namespace

TEST_CASE("MP bounds are exact at the reference points") {
  const auto [lm1, lp1] = mp_bounds(10, 10);
  CHECK(lm1 == 0.0);
  CHECK(lp1 == 4.0);
  const auto [lm2, lp2] = mp_bounds(25, 100);
  CHECK(lm2 == 0.25);
  CHECK(lp2 == 2.25);
  const auto [lm3, lp3] = mp_bounds(0, 50);
  CHECK(lm3 == 1.0);
  CHECK(lp3 == 1.0);
}

TEST_CASE("MP bound product identity") {
  for (const auto& [n, t] : std::vector<std::pair<int, int>>{{10, 40}, {30, 250}, {100, 100}}) {
    const auto [lm, lp] = mp_bounds(n, t);
    const double q = static_cast<double>(n) / t;
    CHECK(lm * lp == doctest::Approx((1.0 - q) * (1.0 - q)).epsilon(1e-12));
  }
}

TEST_CASE("identity matrix decomposes into market plus noise only") {
  const auto d = rmt_decompose(Eigen::MatrixXd::Identity(8, 8), 1000);
  CHECK_FALSE(d.has_group);
  CHECK(d.Cg.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd recon = d.Cr + d.Cg + d.Cm;
  CHECK((recon - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("planted two-block matrix has a group component with block sign structure") {
  const int block = 10;
  const auto c = two_block_corr(block, 0.6, 0.15);
  const auto d = rmt_decompose(c, 500);
  CHECK(d.has_group);
  for (int i = 0; i < 2 * block; ++i) {
    for (int j = 0; j < 2 * block; ++j) {
      if (i == j) continue;
      if ((i < block) == (j < block))
        CHECK(d.Cg(i, j) > 0.0);
      else
        CHECK(d.Cg(i, j) < 0.0);
    }
  }
}

TEST_CASE("decomposition reconstructs the input on random correlation matrices") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 5 + static_cast<int>(seed % 12);
    const auto c = testutil::random_correlation(n, 1000 + seed);
    const auto d = rmt_decompose(c, 4 * n + 8);
    CHECK(((d.Cr + d.Cg + d.Cm) - c).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Q2 closed forms for the trivial partitions") {
  const auto c = two_block_corr(4, 0.6, -0.15);
  const auto d = rmt_decompose(c, 300);
  const Eigen::MatrixXd cs = c - d.Cr;
  const double cnorm = c.sum();

  std::vector<int> one(8, 0);
  CHECK(modularity_q2(c, d, one) == doctest::Approx(cs.sum() / cnorm).epsilon(1e-12));

  std::vector<int> singletons(8);
  for (int i = 0; i < 8; ++i) singletons[static_cast<std::size_t>(i)] = i;
  CHECK(modularity_q2(c, d, singletons) ==
        doctest::Approx(cs.diagonal().sum() / cnorm).epsilon(1e-12));
}

TEST_CASE("the true split maximizes Q2 over all partitions of a planted matrix") {
  const auto c = two_block_corr(4, 0.6, -0.15);
  const auto d = rmt_decompose(c, 300);
  const auto best = brute_force_partition(c, d, ModularityObjective::kQ2);
  CHECK(same_partition(best.assignment, block_split(4)));
  CHECK(best.modularity ==
        doctest::Approx(modularity_q2(c, d, block_split(4))).epsilon(1e-12));
}

TEST_CASE("Q3 requires a mesoscopic component") {
  const auto d = rmt_decompose(Eigen::MatrixXd::Identity(6, 6), 600);
  REQUIRE_FALSE(d.has_group);
  std::vector<int> s(6, 0);
  CHECK_THROWS_WITH_AS(modularity_q3(Eigen::MatrixXd::Identity(6, 6), d, s),
                       doctest::Contains("mesoscopic"), std::runtime_error);
  CHECK_THROWS_AS(
      louvain_maximize(Eigen::MatrixXd::Identity(6, 6), d, ModularityObjective::kQ3, 1),
      std::runtime_error);
}

TEST_CASE("Q3 of the all-in-one partition is near zero when the group mode is a contrast") {
  const auto c = two_block_corr(10, 0.6, 0.15);
  const auto d = rmt_decompose(c, 500);
  REQUIRE(d.has_group);
  std::vector<int> one(20, 0);
  CHECK(std::abs(modularity_q3(c, d, one)) < 1e-8);
}

TEST_CASE("the true split maximizes Q3 when a market mode is present") {
  const auto c = two_block_corr(4, 0.7, 0.3);
  const auto d = rmt_decompose(c, 400);
  REQUIRE(d.has_group);
  const auto best = brute_force_partition(c, d, ModularityObjective::kQ3);
  CHECK(same_partition(best.assignment, block_split(4)));
}

TEST_CASE("modularities are invariant under community relabeling") {
  const auto c = two_block_corr(5, 0.5, 0.2);
  const auto d = rmt_decompose(c, 300);
  std::vector<int> s = {0, 0, 1, 1, 2, 2, 1, 0, 2, 1};
  std::vector<int> relabeled = {5, 5, 9, 9, 3, 3, 9, 5, 3, 9};
  CHECK(modularity_q2(c, d, s) == doctest::Approx(modularity_q2(c, d, relabeled)).epsilon(1e-14));
  if (d.has_group)
    CHECK(modularity_q3(c, d, s) ==
          doctest::Approx(modularity_q3(c, d, relabeled)).epsilon(1e-14));
}

TEST_CASE("louvain recovers two disconnected positive blocks exactly") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if ((i < 4) == (j < 4)) c(i, j) = (i == j) ? 1.0 : 0.5;
  const auto d = passthrough_decomposition(c);
  const auto part = louvain_maximize(c, d, ModularityObjective::kQ2, 42);
  CHECK(part.n_communities == 2);
  CHECK(same_partition(part.assignment, block_split(4)));

  const auto exact = brute_force_partition(c, d, ModularityObjective::kQ2);
  CHECK(part.modularity == doctest::Approx(exact.modularity).epsilon(1e-12));
}

TEST_CASE("a one-factor market collapses into a giant community") {
  const int n = 12;
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(n, n, 0.5);
  c.diagonal().setOnes();
  const auto d = rmt_decompose(c, 250);
  const auto part = louvain_maximize(c, d, ModularityObjective::kQ2, 7);
  std::vector<int> sizes(static_cast<std::size_t>(part.n_communities), 0);
  for (const int g : part.assignment) ++sizes[static_cast<std::size_t>(g)];
  CHECK(*std::max_element(sizes.begin(), sizes.end()) >= n - 2);
}

TEST_CASE("a single node is its own community") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(1, 1);
  const auto d = rmt_decompose(c, 100);
  const auto part = louvain_maximize(c, d, ModularityObjective::kQ2, 3);
  CHECK(part.assignment == std::vector<int>{0});
  CHECK(part.modularity == doctest::Approx(modularity_q2(c, d, {0})).epsilon(1e-14));
}

TEST_CASE("louvain never falls below the all-singletons partition") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 6 + static_cast<int>(seed % 4);
    const auto c = testutil::random_correlation(n, 2000 + seed);
    const auto d = rmt_decompose(c, 4 * n + 8);
    const auto part = louvain_maximize(c, d, ModularityObjective::kQ2, seed);
    std::vector<int> singletons(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) singletons[static_cast<std::size_t>(i)] = i;
    CHECK(part.modularity >= modularity_q2(c, d, singletons) - 1e-12);
  }
}

TEST_CASE("louvain matches the exhaustive oracle on small instances") {
  int attained = 0;
  const int instances = 15;
  for (int k = 0; k < instances; ++k) {
    const int n = 5 + k % 4;
    const auto c = testutil::random_correlation(n, 3000 + static_cast<std::uint64_t>(k), 3 * n);
    const auto d = rmt_decompose(c, 3 * n);
    const auto heur = louvain_maximize(c, d, ModularityObjective::kQ2, 17);
    const auto exact = brute_force_partition(c, d, ModularityObjective::kQ2);
    CHECK(heur.modularity <= exact.modularity + 1e-12);
    if (heur.modularity >= exact.modularity - 1e-12) ++attained;
    CHECK(heur.modularity ==
          doctest::Approx(modularity_q2(c, d, heur.assignment)).epsilon(1e-12));
  }
  CHECK(attained >= instances * 9 / 10);
}

TEST_CASE("brute force evaluates tiny cases and refuses large ones") {
  const auto c3 = Eigen::MatrixXd::Identity(3, 3);
  const auto d3 = rmt_decompose(c3, 100);
  const auto best = brute_force_partition(c3, d3, ModularityObjective::kQ2);
  CHECK(best.modularity == doctest::Approx(modularity_q2(c3, d3, best.assignment)).epsilon(1e-14));

  const auto c13 = Eigen::MatrixXd::Identity(13, 13);
  const auto d13 = rmt_decompose(c13, 100);
  CHECK_THROWS_WITH_AS(brute_force_partition(c13, d13, ModularityObjective::kQ2),
                       doctest::Contains("refus"), std::runtime_error);
}

TEST_CASE("louvain agrees with brute force on planted blocks at n = 8") {
  const auto c = two_block_corr(4, 0.6, -0.15);
  const auto d = rmt_decompose(c, 300);
  const auto heur = louvain_maximize(c, d, ModularityObjective::kQ2, 5);
  const auto exact = brute_force_partition(c, d, ModularityObjective::kQ2);
  CHECK(heur.modularity == doctest::Approx(exact.modularity).epsilon(1e-12));
}

TEST_CASE("unweighted modularity of two disjoint triangles") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
  const auto connect = [&](int i, int j) { a(i, j) = a(j, i) = 1.0; };
  connect(0, 1);
  connect(1, 2);
  connect(0, 2);
  connect(3, 4);
  connect(4, 5);
  connect(3, 5);
  const std::vector<int> split = {0, 0, 0, 1, 1, 1};

  // Direct formula evaluation as the oracle.
  const double two_m = a.sum();
  double expected = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (split[static_cast<std::size_t>(i)] == split[static_cast<std::size_t>(j)])
        expected += a(i, j) - a.row(i).sum() * a.row(j).sum() / two_m;

  const double q = modularity_unweighted(a, split);
  CHECK(q == doctest::Approx(expected).epsilon(1e-12));
  CHECK(q == doctest::Approx(6.0).epsilon(1e-12));

  SUBCASE("all-in-one partition scores exactly zero") {
    CHECK(modularity_unweighted(a, std::vector<int>(6, 0)) == 0.0);
  }
}

TEST_CASE("unweighted modularity rejects empty graphs") {
  CHECK_THROWS_WITH_AS(modularity_unweighted(Eigen::MatrixXd::Zero(4, 4), {0, 0, 1, 1}),
                       doctest::Contains("empty"), std::runtime_error);
}
