#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "marketnet/ggm.hpp"

namespace marketnet {

/// Eigendecomposition of P ordered by decreasing eigenvalue modulus.
struct Spectrum {
  Eigen::VectorXd eigenvalues;   // |l_1| >= |l_2| >= ...
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, sign-fixed
  double gap_ratio = 0.0;        // |l_2| / |l_1|
};

struct DegreeCentrality {
  Eigen::VectorXd degree;      // row sums of P
  Eigen::VectorXd abs_degree;  // row sums of |P|
};

DegreeCentrality degree_centrality(const PartialCorrNetwork& net);

// Full symmetric eigendecomposition; every pair must reconstruct
// P w = l w within tol or the call fails.
Spectrum full_spectrum(const PartialCorrNetwork& net, double tol = 1e-8);

struct EigencentralityResult {
  Eigen::VectorXd f;       // unit norm, largest-|entry| coordinate positive
  bool degenerate = false; // dominant eigenvalue effectively non-unique
};

EigencentralityResult eigencentrality(const Spectrum& spectrum,
                                      double degeneracy_threshold = 0.999);

struct ShockPropagation {
  std::vector<Eigen::VectorXd> powers;  // P^1 d ... P^k d
  Eigen::VectorXd leading_term;         // alpha_1 * W_1
  double alpha1 = 0.0;                  // <d, W_1>
  std::vector<double> decay;            // ||P^j d / l_1^j - alpha_1 W_1||
  bool null_network = false;            // l_1 == 0, propagation trivially zero
};

ShockPropagation shock_propagation(const PartialCorrNetwork& net, int shocked_node, double delta,
                                   int k);

struct CentralityReport {
  int year = 0;
  std::vector<std::string> tickers;
  Eigen::VectorXd degree;
  Eigen::VectorXd abs_degree;
  Eigen::VectorXd eigencentrality;
  double lambda1 = 0.0;          // signed eigenvalue of largest modulus
  double spectral_radius = 0.0;  // |lambda1|
  double gap_ratio = 0.0;
  bool degenerate = false;
  int max_degree_node = 0;
  double mean_degree = 0.0;
  double mean_abs_degree = 0.0;
};

CentralityReport make_centrality_report(const PartialCorrNetwork& net, double tol = 1e-8);

struct TimeseriesRow {
  int year = 0;
  double lambda1 = 0.0;
  double spectral_radius = 0.0;
  double max_degree = 0.0;
  std::string max_degree_ticker;
  double mean_degree = 0.0;
  double mean_abs_degree = 0.0;
};

std::vector<TimeseriesRow> centrality_timeseries(const std::vector<CentralityReport>& reports);

struct Histogram {
  double bin_width = 0.1;
  std::vector<double> bin_low;      // lower edge of each bin
  std::vector<long long> counts;
};

Histogram degree_histogram(const Eigen::VectorXd& values, double bin_width = 0.1);

}  // namespace marketnet
