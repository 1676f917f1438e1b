#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace marketnet {

// Marcenko-Pastur support edges: (1 -+ sqrt(n/T))^2.
std::pair<double, double> mp_bounds(int n, int t_obs);

/// Spectral split of a correlation matrix into noise (eigenvalues <= l+),
/// market (the largest eigenvalue), and the strictly in-between group part.
struct RmtDecomposition {
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  Eigen::MatrixXd Cr;  // noise component
  Eigen::MatrixXd Cg;  // mesoscopic/group component (zero when has_group is false)
  Eigen::MatrixXd Cm;  // market component, rank one
  Eigen::MatrixXd Cs;  // Cg + Cm
  bool has_group = false;
  Eigen::VectorXd eigenvalues;  // ascending
};

RmtDecomposition rmt_decompose(const Eigen::MatrixXd& c, int t_obs);

enum class ModularityObjective { kQ2, kQ3 };

// Q2(s) = sum_ij (C - Cr)_ij delta(s_i, s_j) / sum_ij C_ij.
double modularity_q2(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                     const std::vector<int>& assignment);

// Q3(s) = sum_ij Cg_ij delta(s_i, s_j) / sum_ij C_ij; needs a group component.
double modularity_q3(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                     const std::vector<int>& assignment);

struct CommunityPartition {
  std::vector<int> assignment;  // community ids contiguous from 0
  double modularity = 0.0;      // direct evaluation of the objective
  ModularityObjective objective = ModularityObjective::kQ2;
  double cnorm = 0.0;
  int n_communities = 0;
};

// Louvain-style maximization adjusted for a spectral null model: local moves
// by modularity gain, then aggregation that sums entries of the original
// filtered matrix over groups (no degree-based rescaling). Node order is
// shuffled by seed; ties in gain go to the lowest community id.
CommunityPartition louvain_maximize(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                                    ModularityObjective objective, std::uint64_t seed,
                                    int restarts = 8);

// Exact maximizer by enumeration over set partitions; refuses n > 12.
CommunityPartition brute_force_partition(const Eigen::MatrixXd& c, const RmtDecomposition& d,
                                         ModularityObjective objective);

// Newman modularity for a 0/1 adjacency matrix in the un-normalized form
// sum_ij (A_ij - k_i k_j / 2m) delta(s_i, s_j).
double modularity_unweighted(const Eigen::MatrixXd& a, const std::vector<int>& assignment);

}  // namespace marketnet
