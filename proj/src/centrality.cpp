#include "marketnet/centrality.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "marketnet/spectral.hpp"

namespace marketnet {

DegreeCentrality degree_centrality(const PartialCorrNetwork& net) {
  DegreeCentrality out;
  out.degree = net.P.rowwise().sum();
  out.abs_degree = net.P.cwiseAbs().rowwise().sum();
  return out;
}

namespace {

// Deterministic orientation: the largest-|entry| coordinate is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

Spectrum full_spectrum(const PartialCorrNetwork& net, double tol) {
  const auto& p = net.P;
  const auto eig = jacobi_eigen(p);
  const Eigen::Index n = p.rows();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(eig.values[a]), mb = std::abs(eig.values[b]);
    if (ma != mb) return ma > mb;
    return eig.values[a] > eig.values[b];
  });

  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = eig.values[order[static_cast<std::size_t>(i)]];
    out.eigenvectors.col(i) = eig.vectors.col(order[static_cast<std::size_t>(i)]);
    fix_sign(out.eigenvectors.col(i));
    const double resid =
        (p * out.eigenvectors.col(i) - out.eigenvalues[i] * out.eigenvectors.col(i))
            .cwiseAbs()
            .maxCoeff();
    if (resid > tol)
      throw std::runtime_error("eigendecomposition failed to converge, residual " +
                               std::to_string(resid));
  }
  out.gap_ratio = (n >= 2 && std::abs(out.eigenvalues[0]) > 0.0)
                      ? std::abs(out.eigenvalues[1]) / std::abs(out.eigenvalues[0])
                      : 0.0;
  return out;
}

EigencentralityResult eigencentrality(const Spectrum& spectrum, double degeneracy_threshold) {
  if (spectrum.eigenvalues.size() == 0 || spectrum.eigenvalues[0] == 0.0)
    throw std::runtime_error("null network");
  EigencentralityResult out;
  out.f = spectrum.eigenvectors.col(0);
  out.f /= out.f.norm();
  fix_sign(out.f);
  out.degenerate = spectrum.gap_ratio > degeneracy_threshold;
  return out;
}

ShockPropagation shock_propagation(const PartialCorrNetwork& net, int shocked_node, double delta,
                                   int k) {
  const Eigen::Index n = net.P.rows();
  if (shocked_node < 0 || shocked_node >= n) throw std::invalid_argument("invalid shocked node");
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  ShockPropagation out;
  Eigen::VectorXd shock = Eigen::VectorXd::Zero(n);
  shock[shocked_node] = delta;

  const auto spectrum = full_spectrum(net);
  const double lambda1 = spectrum.eigenvalues[0];
  if (lambda1 == 0.0) {
    out.null_network = true;
    out.leading_term = Eigen::VectorXd::Zero(n);
    out.powers.assign(static_cast<std::size_t>(k), Eigen::VectorXd::Zero(n));
    out.decay.assign(static_cast<std::size_t>(k), 0.0);
    return out;
  }
  out.alpha1 = spectrum.eigenvectors.col(0).dot(shock);
  out.leading_term = out.alpha1 * spectrum.eigenvectors.col(0);

  Eigen::VectorXd v = shock;
  double lambda_pow = 1.0;
  out.powers.reserve(static_cast<std::size_t>(k));
  out.decay.reserve(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    v = net.P * v;
    lambda_pow *= lambda1;
    out.powers.push_back(v);
    out.decay.push_back((v / lambda_pow - out.leading_term).norm());
  }
  return out;
}

CentralityReport make_centrality_report(const PartialCorrNetwork& net, double tol) {
  CentralityReport rep;
  rep.year = net.year;
  rep.tickers = net.tickers;
  const auto deg = degree_centrality(net);
  rep.degree = deg.degree;
  rep.abs_degree = deg.abs_degree;

  const auto spectrum = full_spectrum(net, tol);
  rep.lambda1 = spectrum.eigenvalues.size() ? spectrum.eigenvalues[0] : 0.0;
  rep.spectral_radius = std::abs(rep.lambda1);
  rep.gap_ratio = spectrum.gap_ratio;
  if (rep.lambda1 != 0.0) {
    const auto ec = eigencentrality(spectrum);
    rep.eigencentrality = ec.f;
    rep.degenerate = ec.degenerate;
  } else {
    rep.eigencentrality = Eigen::VectorXd::Zero(net.P.rows());
    rep.degenerate = false;
  }

  rep.max_degree_node = 0;
  for (Eigen::Index i = 1; i < rep.degree.size(); ++i)
    if (rep.degree[i] > rep.degree[rep.max_degree_node]) rep.max_degree_node = static_cast<int>(i);
  rep.mean_degree = rep.degree.size() ? rep.degree.mean() : 0.0;
  rep.mean_abs_degree = rep.abs_degree.size() ? rep.abs_degree.mean() : 0.0;
  return rep;
}

std::vector<TimeseriesRow> centrality_timeseries(const std::vector<CentralityReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("no reports");
  std::vector<TimeseriesRow> rows;
  rows.reserve(reports.size());
  for (const auto& rep : reports) {
    TimeseriesRow row;
    row.year = rep.year;
    row.lambda1 = rep.lambda1;
    row.spectral_radius = rep.spectral_radius;
    row.max_degree = rep.degree.size() ? rep.degree[rep.max_degree_node] : 0.0;
    row.max_degree_ticker = rep.tickers.empty()
                                ? ""
                                : rep.tickers[static_cast<std::size_t>(rep.max_degree_node)];
    row.mean_degree = rep.mean_degree;
    row.mean_abs_degree = rep.mean_abs_degree;
    rows.push_back(std::move(row));
  }
  return rows;
}

Histogram degree_histogram(const Eigen::VectorXd& values, double bin_width) {
  if (bin_width <= 0.0) throw std::invalid_argument("bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (values.size() == 0) return h;
  const auto bin_of = [&](double v) {
    return static_cast<long long>(std::floor(v / bin_width));
  };
  long long lo = bin_of(values[0]), hi = lo;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    lo = std::min(lo, bin_of(values[i]));
    hi = std::max(hi, bin_of(values[i]));
  }
  h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  h.bin_low.resize(h.counts.size());
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    h.bin_low[b] = (static_cast<double>(lo) + static_cast<double>(b)) * bin_width;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    ++h.counts[static_cast<std::size_t>(bin_of(values[i]) - lo)];
  return h;
}

}  // namespace marketnet
