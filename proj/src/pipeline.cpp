#include "marketnet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>

#include "marketnet/community.hpp"
#include "marketnet/csv.hpp"
#include "marketnet/graph_export.hpp"
#include "marketnet/util.hpp"

namespace marketnet {

namespace {

namespace fs = std::filesystem;

std::string year_file(const std::string& prefix, int year, const std::string& suffix) {
  return prefix + std::to_string(year) + suffix;
}

void require_artifact(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path))
    throw std::runtime_error("missing upstream artifact " + path.string() +
                             " — produce it with `marketnet " + producer + "`");
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path.string());
  nlohmann::json j;
  in >> j;
  return j;
}

std::vector<std::string> meta_sectors(const nlohmann::json& meta,
                                      const std::vector<std::string>& tickers) {
  std::vector<std::string> sectors(tickers.size(), "unknown");
  if (!meta.contains("sectors")) return sectors;
  const auto& m = meta["sectors"];
  for (std::size_t i = 0; i < tickers.size(); ++i)
    if (m.contains(tickers[i])) sectors[i] = m[tickers[i]].get<std::string>();
  return sectors;
}

}  // namespace

IngestSummary stage_ingest(const RunConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto load = load_prices(config.prices, config.schema);
  IngestSummary summary;
  summary.dropped_rows = load.dropped_rows;
  summary.duplicates = load.duplicates;
  summary.windows = yearly_windows(load.panel, config.years, config.filter);
  for (const auto& w : summary.windows) {
    nlohmann::json meta;
    meta["year"] = w.year;
    meta["flagged"] = w.flagged;
    meta["note"] = w.note;
    meta["n_price_dates"] = w.n_price_dates;
    meta["n_returns"] = w.panel.returns.rows();
    meta["tickers"] = w.panel.tickers;
    nlohmann::json sectors = nlohmann::json::object();
    for (std::size_t i = 0; i < w.panel.tickers.size(); ++i)
      sectors[w.panel.tickers[i]] = w.panel.sectors[i];
    meta["sectors"] = sectors;
    meta["dropped_completeness"] = w.dropped_completeness;
    meta["dropped_variance"] = w.dropped_variance;
    write_json(out_dir / year_file("panel_meta_", w.year, ".json"), meta);
    if (w.panel.returns.rows() > 0)
      write_returns_csv(out_dir / year_file("returns_", w.year, ".csv"), w.panel);
  }
  return summary;
}

void stage_ggm_year(const RunConfig& config, const fs::path& in_dir, const fs::path& out_dir,
                    int year) {
  fs::create_directories(out_dir);
  const auto returns_path = in_dir / year_file("returns_", year, ".csv");
  require_artifact(returns_path, "ingest");
  auto panel = read_returns_csv(returns_path);

  const auto meta_path = in_dir / year_file("panel_meta_", year, ".json");
  if (fs::exists(meta_path)) panel.sectors = meta_sectors(read_json(meta_path), panel.tickers);

  auto params = config.ggm;
  params.threads = config.threads;
  const auto estimate = estimate_ggm(panel, params, year);

  write_matrix_csv(out_dir / year_file("pcorr_", year, ".csv"), panel.tickers,
                   estimate.network.P);
  write_graphml(out_dir / year_file("network_", year, ".graphml"), estimate.network);
  write_dot(out_dir / year_file("network_", year, ".dot"), estimate.network);
  write_network_json(out_dir / year_file("network_", year, ".json"), estimate.network);

  nlohmann::json meta;
  meta["year"] = year;
  meta["sign_conflicts"] = estimate.network.sign_conflicts;
  meta["clipped"] = estimate.network.clipped;
  meta["degenerate_n_gt_t"] = estimate.degenerate_n_gt_t;
  nlohmann::json lambdas = nlohmann::json::object();
  for (const auto& fit : estimate.fits)
    lambdas[panel.tickers[static_cast<std::size_t>(fit.node)]] = fit.lambda;
  meta["lambda"] = lambdas;
  write_json(out_dir / year_file("ggm_meta_", year, ".json"), meta);
}

CentralityReport stage_centrality_year(const RunConfig& config, const fs::path& in_dir,
                                       const fs::path& out_dir, int year) {
  fs::create_directories(out_dir);
  const auto pcorr_path = in_dir / year_file("pcorr_", year, ".csv");
  require_artifact(pcorr_path, "ggm");
  const auto named = read_matrix_csv(pcorr_path);

  PartialCorrNetwork net;
  net.P = named.m;
  net.tickers = named.tickers;
  net.sectors.assign(named.tickers.size(), "unknown");
  net.year = year;
  const auto report = make_centrality_report(net);

  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < net.tickers.size(); ++i)
      rows.push_back({net.tickers[i], fmt_g17(report.degree[static_cast<Eigen::Index>(i)]),
                      fmt_g17(report.abs_degree[static_cast<Eigen::Index>(i)]),
                      fmt_g17(report.eigencentrality[static_cast<Eigen::Index>(i)])});
    write_csv(out_dir / year_file("centrality_", year, ".csv"),
              {"node", "degree", "abs_degree", "eigencentrality"}, rows);
  }
  {
    const auto spectrum = full_spectrum(net);
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i)
      rows.push_back({std::to_string(i), fmt_g17(spectrum.eigenvalues[i]),
                      fmt_g17(std::abs(spectrum.eigenvalues[i]))});
    write_csv(out_dir / year_file("spectrum_", year, ".csv"),
              {"rank", "eigenvalue", "modulus"}, rows);
  }
  {
    const auto hist = degree_histogram(report.degree, config.hist_bin_width);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t b = 0; b < hist.counts.size(); ++b)
      rows.push_back({fmt_g17(hist.bin_low[b]), fmt_g17(hist.bin_low[b] + hist.bin_width),
                      std::to_string(hist.counts[b])});
    write_csv(out_dir / year_file("degree_hist_", year, ".csv"),
              {"bin_low", "bin_high", "count"}, rows);
  }
  return report;
}

void write_centrality_timeseries_csv(const fs::path& out_dir,
                                     const std::vector<CentralityReport>& reports) {
  const auto rows_in = centrality_timeseries(reports);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rows_in)
    rows.push_back({std::to_string(r.year), fmt_g17(r.lambda1), fmt_g17(r.spectral_radius),
                    fmt_g17(r.max_degree), r.max_degree_ticker, fmt_g17(r.mean_degree),
                    fmt_g17(r.mean_abs_degree)});
  write_csv(out_dir / "centrality_timeseries.csv",
            {"year", "lambda1", "spectral_radius", "max_degree", "max_degree_ticker",
             "mean_degree", "mean_abs_degree"},
            rows);
}

GarchYearResult stage_garch_year(const RunConfig& config, const fs::path& in_dir,
                                 const fs::path& out_dir, int year) {
  fs::create_directories(out_dir);
  const auto returns_path = in_dir / year_file("returns_", year, ".csv");
  require_artifact(returns_path, "ingest");
  auto panel = read_returns_csv(returns_path);
  const auto meta_path = in_dir / year_file("panel_meta_", year, ".json");
  if (fs::exists(meta_path)) panel.sectors = meta_sectors(read_json(meta_path), panel.tickers);

  YearlyCorrelationOptions options;
  options.garch = config.garch;
  options.dcc = config.dcc;
  options.source = config.correlation_source;
  options.threads = config.threads;
  const auto yc = yearly_correlation(panel, options);

  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < yc.tickers.size(); ++i) {
      const auto& p = yc.fit.univariate[i];
      rows.push_back({yc.tickers[i], fmt_g17(p.mu), fmt_g17(p.phi), fmt_g17(p.psi),
                      fmt_g17(p.alpha0), fmt_g17(p.alpha1), fmt_g17(p.beta1), fmt_g17(p.loglik)});
    }
    write_csv(out_dir / year_file("garch_params_", year, ".csv"),
              {"ticker", "mu", "phi", "psi", "alpha0", "alpha1", "beta1", "loglik"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : mu_table(yc.fit.univariate, yc.tickers)) rows.push_back({r.ticker, r.mu});
    write_csv(out_dir / year_file("mu_table_", year, ".csv"), {"ticker", "mu"}, rows);
  }
  write_matrix_csv(out_dir / year_file("correlation_", year, ".csv"), yc.tickers, yc.C);

  nlohmann::json meta;
  meta["year"] = year;
  meta["a"] = yc.fit.a;
  meta["b"] = yc.fit.b;
  meta["loglik"] = yc.fit.loglik;
  meta["n_obs"] = panel.returns.rows() - 1;  // standardized residual rows
  meta["dropped"] = yc.dropped;
  meta["warnings"] = yc.warnings;
  write_json(out_dir / year_file("garch_meta_", year, ".json"), meta);

  GarchYearResult out;
  out.warnings = yc.warnings;
  return out;
}

std::vector<ModularityRow> stage_community_year(const RunConfig& config, const fs::path& in_dir,
                                                const fs::path& out_dir, int year) {
  fs::create_directories(out_dir);
  const auto corr_path = in_dir / year_file("correlation_", year, ".csv");
  require_artifact(corr_path, "garch");
  const auto meta_path = in_dir / year_file("garch_meta_", year, ".json");
  require_artifact(meta_path, "garch");
  const auto named = read_matrix_csv(corr_path);
  const int t_obs = read_json(meta_path)["n_obs"].get<int>();

  const auto decomposition = rmt_decompose(named.m, t_obs);
  std::vector<ModularityRow> rows;

  const auto emit = [&](ModularityObjective objective, const std::string& tag,
                        const Eigen::MatrixXd& weights, double threshold) {
    const auto part = louvain_maximize(named.m, decomposition, objective, config.seed,
                                       config.community_restarts);
    std::vector<std::vector<std::string>> csv_rows;
    for (std::size_t i = 0; i < named.tickers.size(); ++i)
      csv_rows.push_back({named.tickers[i], std::to_string(part.assignment[i])});
    write_csv(out_dir / (year_file("communities_", year, "_") + tag + ".csv"),
              {"node", "community"}, csv_rows);
    write_community_graphml(out_dir / (year_file("communities_", year, "_") + tag + ".graphml"),
                            named.tickers, weights, part.assignment, threshold);
    rows.push_back(
        {year, tag, part.n_communities, part.modularity, decomposition.has_group});
  };

  if (config.run_q2)
    emit(ModularityObjective::kQ2, "q2", decomposition.Cs, config.q2_edge_threshold);
  if (config.run_q3 && decomposition.has_group)
    emit(ModularityObjective::kQ3, "q3", decomposition.Cg, config.q3_edge_threshold);
  return rows;
}

void write_modularity_summary_csv(const fs::path& out_dir,
                                  const std::vector<ModularityRow>& rows) {
  std::vector<std::vector<std::string>> csv_rows;
  for (const auto& r : rows)
    csv_rows.push_back({std::to_string(r.year), r.objective, std::to_string(r.n_communities),
                        fmt_g17(r.q), r.has_group ? "true" : "false"});
  write_csv(out_dir / "modularity_summary.csv",
            {"year", "objective", "n_communities", "Q", "has_group"}, csv_rows);
}

std::vector<int> detect_years(const fs::path& dir, const std::string& prefix,
                              const std::string& suffix) {
  std::vector<int> years;
  if (!fs::exists(dir)) return years;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.size() <= prefix.size() + suffix.size()) continue;
    if (name.rfind(prefix, 0) != 0 || name.substr(name.size() - suffix.size()) != suffix) continue;
    const auto middle = name.substr(prefix.size(), name.size() - prefix.size() - suffix.size());
    if (middle.empty() || !std::all_of(middle.begin(), middle.end(),
                                       [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    years.push_back(std::stoi(middle));
  }
  std::sort(years.begin(), years.end());
  years.erase(std::unique(years.begin(), years.end()), years.end());
  return years;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = config_snapshot;
  nlohmann::json year_list = nlohmann::json::array();
  for (const auto& y : years) {
    year_list.push_back({{"year", y.year},
                         {"ok", y.ok},
                         {"flagged", y.flagged},
                         {"note", y.note},
                         {"tickers_kept", y.tickers_kept},
                         {"warnings", y.warnings},
                         {"elapsed_ms", y.elapsed_ms}});
  }
  j["years"] = year_list;
  nlohmann::json sums = nlohmann::json::object();
  for (const auto& [path, hash] : checksums) sums[path] = hash;
  j["artifacts"] = sums;
  return j;
}

int manifest_exit_code(const RunManifest& manifest) {
  int failed = 0;
  for (const auto& y : manifest.years)
    if (!y.ok) ++failed;
  if (failed == 0) return 0;
  return failed == static_cast<int>(manifest.years.size()) ? 1 : 2;
}

RunManifest run_pipeline(const RunConfig& config) {
  validate_config(config);
  const auto& out_dir = config.output_dir;

  RunManifest manifest;
  manifest.config_snapshot = config_to_json(config);

  const auto ingest = stage_ingest(config, out_dir);
  manifest.years.resize(ingest.windows.size());

  std::vector<std::optional<CentralityReport>> reports(ingest.windows.size());
  std::vector<std::vector<ModularityRow>> community_rows(ingest.windows.size());

  parallel_for(ingest.windows.size(), config.threads, [&](std::size_t k) {
    const auto& window = ingest.windows[k];
    auto& outcome = manifest.years[k];
    outcome.year = window.year;
    outcome.flagged = window.flagged;
    outcome.note = window.note;
    outcome.tickers_kept = static_cast<int>(window.panel.tickers.size());
    const auto start = std::chrono::steady_clock::now();
    try {
      if (window.panel.returns.rows() == 0 || window.panel.tickers.size() < 2) {
        // Degenerate year: recorded, nothing further to compute.
        outcome.ok = true;
      } else {
        stage_ggm_year(config, out_dir, out_dir, window.year);
        reports[k] = stage_centrality_year(config, out_dir, out_dir, window.year);
        const auto garch_result = stage_garch_year(config, out_dir, out_dir, window.year);
        outcome.warnings.insert(outcome.warnings.end(), garch_result.warnings.begin(),
                                garch_result.warnings.end());
        community_rows[k] = stage_community_year(config, out_dir, out_dir, window.year);
        outcome.ok = true;
      }
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.note = e.what();
    }
    outcome.elapsed_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  });

  std::vector<CentralityReport> ordered_reports;
  for (const auto& r : reports)
    if (r) ordered_reports.push_back(*r);
  if (!ordered_reports.empty()) write_centrality_timeseries_csv(out_dir, ordered_reports);

  std::vector<ModularityRow> all_rows;
  for (const auto& rows : community_rows) all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  write_modularity_summary_csv(out_dir, all_rows);

  // Checksum every artifact; the manifest itself is written afterwards.
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir))
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    manifest.checksums.emplace_back(fs::relative(f, out_dir).string(),
                                    hex64(fnv1a64_file(f.string())));

  write_json(out_dir / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace marketnet
