#include "marketnet/community.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "marketnet/spectral.hpp"
#include "marketnet/util.hpp"

namespace marketnet {

std::pair<double, double> mp_bounds(int n, int t_obs) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (t_obs < 1) throw std::invalid_argument("T must be >= 1");
  const double root = std::sqrt(static_cast<double>(n) / static_cast<double>(t_obs));
  return {(1.0 - root) * (1.0 - root), (1.0 + root) * (1.0 + root)};
}

RmtDecomposition rmt_decompose(const Eigen::MatrixXd& c, int t_obs) {
  const auto n = c.rows();
  if (c.cols() != n || n < 1) throw std::invalid_argument("correlation matrix must be square");
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("correlation matrix must be symmetric");
  if ((c.diagonal().array() - 1.0).abs().maxCoeff() > 1e-8)
    throw std::invalid_argument("correlation matrix must have unit diagonal");

  RmtDecomposition d;
  std::tie(d.lambda_minus, d.lambda_plus) = mp_bounds(static_cast<int>(n), t_obs);
  const auto eig = jacobi_eigen(c);
  d.eigenvalues = eig.values;

  d.Cr = Eigen::MatrixXd::Zero(n, n);
  d.Cg = Eigen::MatrixXd::Zero(n, n);
  // Market mode: the largest (signed) eigenvalue.
  d.Cm = eig.values[n - 1] * (eig.vectors.col(n - 1) * eig.vectors.col(n - 1).transpose());
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    const Eigen::MatrixXd outer = eig.vectors.col(i) * eig.vectors.col(i).transpose();
    if (eig.values[i] <= d.lambda_plus) {
      d.Cr += eig.values[i] * outer;
    } else {
      d.Cg += eig.values[i] * outer;
      d.has_group = true;
    }
  }
  d.Cs = d.Cg + d.Cm;
  return d;
}

namespace {

double cnorm_checked(const Eigen::MatrixXd& c) {
  const double cnorm = c.sum();
  if (cnorm == 0.0) throw std::runtime_error("degenerate normalizer");
  if (cnorm < 0.0) throw std::runtime_error("negative normalizer Sum C_ij");
  return cnorm;
}

void check_assignment(const std::vector<int>& s, Eigen::Index n) {
  if (static_cast<Eigen::Index>(s.size()) != n)
    throw std::invalid_argument("assignment length must match the matrix size");
}

double evaluate(const Eigen::MatrixXd& b, double cnorm, const std::vector<int>& s) {
  double sum = 0.0;
  const auto n = b.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (s[static_cast<std::size_t>(i)] == s[static_cast<std::size_t>(j)]) sum += b(i, j);
  return sum / cnorm;
}

std::vector<int> canonical_ids(const std::vector<int>& s) {
  std::vector<int> mapping;
  std::vector<int> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto it = std::find(mapping.begin(), mapping.end(), s[i]);
    if (it == mapping.end()) {
      mapping.push_back(s[i]);
      out[i] = static_cast<int>(mapping.size()) - 1;
    } else {
      out[i] = static_cast<int>(it - mapping.begin());
    }
  }
  return out;
}

// One Louvain run on the modularity matrix b (gain comparisons only need the
// community sums since cnorm > 0 is constant).
std::vector<int> louvain_run(const Eigen::MatrixXd& b, std::uint64_t seed) {
  const auto n0 = b.rows();
  std::vector<int> node_to_final(static_cast<std::size_t>(n0));
  std::iota(node_to_final.begin(), node_to_final.end(), 0);

  Eigen::MatrixXd level = b;
  std::uint64_t phase_seed = seed;
  while (true) {
    const auto n = level.rows();
    std::vector<int> comm(static_cast<std::size_t>(n));
    std::iota(comm.begin(), comm.end(), 0);

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, phase_seed++);

    bool any_move = false;
    bool moved = true;
    while (moved) {
      moved = false;
      std::vector<int> occupancy(static_cast<std::size_t>(n), 0);
      for (const int g : comm) ++occupancy[static_cast<std::size_t>(g)];
      for (const auto node : order) {
        const auto i = static_cast<Eigen::Index>(node);
        // Connection weight from i into each community, excluding itself.
        std::vector<double> weight_to(static_cast<std::size_t>(n), 0.0);
        for (Eigen::Index j = 0; j < n; ++j)
          if (j != i)
            weight_to[static_cast<std::size_t>(comm[static_cast<std::size_t>(j)])] += level(i, j);
        const int cur = comm[node];
        const double stay_weight = weight_to[static_cast<std::size_t>(cur)];
        // Candidates: every occupied community at its weight, empty ones at 0
        // (detaching into a fresh singleton). Lowest id wins ties.
        int best = cur;
        double best_weight = stay_weight;
        for (int g = 0; g < static_cast<int>(n); ++g) {
          const bool occupied = occupancy[static_cast<std::size_t>(g)] > (g == cur ? 1 : 0);
          const double w = occupied ? weight_to[static_cast<std::size_t>(g)] : 0.0;
          if (w > best_weight) {
            best = g;
            best_weight = w;
          }
        }
        if (best != cur && best_weight > stay_weight) {
          --occupancy[static_cast<std::size_t>(cur)];
          ++occupancy[static_cast<std::size_t>(best)];
          comm[node] = best;
          moved = true;
          any_move = true;
        }
      }
    }
    if (!any_move) break;

    // Aggregate: communities become nodes, entries are group sums over the
    // current level's matrix.
    const auto ids = canonical_ids(comm);
    const int n_groups = 1 + *std::max_element(ids.begin(), ids.end());
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n_groups, n_groups);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        next(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]) += level(i, j);
    for (auto& f : node_to_final) f = ids[static_cast<std::size_t>(f)];
    if (n_groups == static_cast<int>(n)) break;
    level = std::move(next);
  }
  return canonical_ids(node_to_final);
}

const Eigen::MatrixXd& objective_matrix(const RmtDecomposition& d, ModularityObjective objective) {
  if (objective == ModularityObjective::kQ3) {
    if (!d.has_group) throw std::runtime_error("no mesoscopic component");
    return d.Cg;
  }
  return d.Cs;
}

}  // namespace

double modularity_q2(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                     const std::vector<int>& assignment) {
  check_assignment(assignment, c.rows());
  return evaluate(c - d.Cr, cnorm_checked(c), assignment);
}

double modularity_q3(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                     const std::vector<int>& assignment) {
  check_assignment(assignment, c.rows());
  if (!d.has_group) throw std::runtime_error("no mesoscopic component");
  return evaluate(d.Cg, cnorm_checked(c), assignment);
}

CommunityPartition louvain_maximize(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                                    ModularityObjective objective, std::uint64_t seed,
                                    int restarts) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const auto& b = objective_matrix(d, objective);
  const double cnorm = cnorm_checked(c);

  CommunityPartition best;
  bool have_best = false;
  for (int r = 0; r < restarts; ++r) {
    const auto assignment = louvain_run(b, seed + static_cast<std::uint64_t>(r) * 7919);
    const double q = evaluate(b, cnorm, assignment);
    if (!have_best || q > best.modularity) {
      best.assignment = assignment;
      best.modularity = q;
      have_best = true;
    }
  }
  best.objective = objective;
  best.cnorm = cnorm;
  best.n_communities = 1 + *std::max_element(best.assignment.begin(), best.assignment.end());
  return best;
}

CommunityPartition brute_force_partition(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                                         ModularityObjective objective) {
  const auto n = c.rows();
  if (n > 12) throw std::runtime_error("refusing exhaustive enumeration beyond n = 12");
  const auto& b = objective_matrix(d, objective);
  const double cnorm = cnorm_checked(c);

  std::vector<int> current(static_cast<std::size_t>(n), 0);
  CommunityPartition best;
  best.objective = objective;
  best.cnorm = cnorm;
  bool have_best = false;

  // Restricted growth strings enumerate set partitions exactly once.
  const std::function<void(std::size_t, int)> recurse = [&](std::size_t pos, int max_used) {
    if (pos == current.size()) {
      const double q = evaluate(b, cnorm, current);
      if (!have_best || q > best.modularity) {
        best.modularity = q;
        best.assignment = current;
        have_best = true;
      }
      return;
    }
    for (int g = 0; g <= max_used + 1; ++g) {
      current[pos] = g;
      recurse(pos + 1, std::max(max_used, g));
    }
  };
  current[0] = 0;
  recurse(1, 0);
  if (n == 1) {
    best.assignment = {0};
    best.modularity = evaluate(b, cnorm, best.assignment);
  }
  best.n_communities = 1 + *std::max_element(best.assignment.begin(), best.assignment.end());
  return best;
}

double modularity_unweighted(const Eigen::MatrixXd& a, const std::vector<int>& assignment) {
  const auto n = a.rows();
  check_assignment(assignment, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (a(i, j) != 0.0 && a(i, j) != 1.0)
        throw std::invalid_argument("adjacency matrix must be binary");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("adjacency matrix must be symmetric");

  const double two_m = a.sum();
  if (two_m == 0.0) throw std::runtime_error("empty graph");

  const Eigen::VectorXd degrees = a.rowwise().sum();
  const int n_comms = 1 + *std::max_element(assignment.begin(), assignment.end());
  std::vector<double> degree_sum(static_cast<std::size_t>(n_comms), 0.0);
  double edge_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    degree_sum[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])] += degrees[i];
    for (Eigen::Index j = 0; j < n; ++j)
      if (assignment[static_cast<std::size_t>(i)] == assignment[static_cast<std::size_t>(j)])
        edge_sum += a(i, j);
  }
  // Factored form keeps the all-in-one partition at exactly zero.
  double null_sum = 0.0;
  for (const double ds : degree_sum) null_sum += ds * ds;
  return edge_sum - null_sum / two_m;
}

}  // namespace marketnet
