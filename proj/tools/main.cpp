#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "marketnet/pipeline.hpp"

namespace {

struct CliState {
  std::string config_path;
  std::string in_dir;
  std::string out_dir;
  std::string prices;
  std::vector<int> years;
  int threads = -1;
  long long seed = -1;
  std::string log_level;
};

marketnet::RunConfig build_config(const CliState& state) {
  marketnet::RunConfig config;
  if (!state.config_path.empty()) config = marketnet::load_config(state.config_path);
  if (!state.prices.empty()) config.prices = state.prices;
  if (!state.years.empty()) config.years = state.years;
  if (state.threads >= 0) config.threads = state.threads;
  if (state.seed >= 0) config.seed = static_cast<std::uint64_t>(state.seed);
  if (!state.log_level.empty()) config.log_level = state.log_level;
  if (!state.out_dir.empty()) config.output_dir = state.out_dir;
  return config;
}

bool log_info(const marketnet::RunConfig& config) {
  return config.log_level == "debug" || config.log_level == "info";
}

std::vector<int> years_or_detect(const CliState& state, const marketnet::RunConfig& config,
                                 const std::string& prefix, const std::string& suffix) {
  if (!state.years.empty()) return state.years;
  if (!config.years.empty()) return config.years;
  return marketnet::detect_years(state.in_dir, prefix, suffix);
}

int run_command(const CliState& state) {
  auto config = build_config(state);
  const auto manifest = marketnet::run_pipeline(config);
  for (const auto& y : manifest.years) {
    if (log_info(config) || !y.ok)
      std::fprintf(y.ok ? stdout : stderr, "%d: %s%s (tickers %d, %.0f ms)\n", y.year,
                   y.ok ? (y.flagged ? "flagged" : "ok") : "FAILED",
                   y.note.empty() ? "" : (" - " + y.note).c_str(), y.tickers_kept, y.elapsed_ms);
  }
  if (log_info(config))
    std::fprintf(stdout, "manifest: %s\n", (config.output_dir / "manifest.json").c_str());
  return marketnet::manifest_exit_code(manifest);
}

int ingest_command(const CliState& state) {
  auto config = build_config(state);
  if (config.prices.empty()) {
    if (state.in_dir.empty())
      throw std::runtime_error("ingest needs --prices, --config with input.prices, or --in");
    config.prices = std::filesystem::path(state.in_dir) / "prices.csv";
  }
  if (config.years.empty()) throw std::runtime_error("nothing to do: no years specified");
  const auto summary = marketnet::stage_ingest(config, config.output_dir);
  for (const auto& w : summary.windows)
    if (log_info(config))
      std::fprintf(stdout, "%d: %zu tickers, %lld return rows%s%s\n", w.year,
                   w.panel.tickers.size(), static_cast<long long>(w.panel.returns.rows()),
                   w.flagged ? " [flagged: " : "", w.flagged ? (w.note + "]").c_str() : "");
  return 0;
}

template <typename Fn>
int per_year_command(const CliState& state, const std::string& prefix, const std::string& suffix,
                     Fn&& fn) {
  const auto config = build_config(state);
  const auto years = years_or_detect(state, config, prefix, suffix);
  if (years.empty())
    throw std::runtime_error("no years given and none detected in " + state.in_dir);
  for (const int year : years) fn(config, year);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "marketnet: sparse partial-correlation networks, centralities, DCC correlation "
      "matrices and RMT-filtered communities for stock return panels"};
  app.require_subcommand(1);

  CliState state;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", state.config_path, "configuration file");
    cmd->add_option("--seed", state.seed, "seed override");
    cmd->add_option("--threads", state.threads, "worker thread count (0 = all cores)");
    cmd->add_option("--log-level", state.log_level, "debug|info|warn|error");
  };

  auto* run = app.add_subcommand("run", "run the full per-year pipeline from a config");
  run->add_option("--config", state.config_path, "configuration file")->required();
  run->add_option("--seed", state.seed, "seed override");
  run->add_option("--threads", state.threads, "worker thread count (0 = all cores)");
  run->add_option("--log-level", state.log_level, "debug|info|warn|error");
  run->add_option("--out", state.out_dir, "output directory override");

  auto* ingest = app.add_subcommand("ingest", "load prices, filter, write per-year returns");
  add_common(ingest);
  ingest->add_option("--in", state.in_dir, "directory holding prices.csv");
  ingest->add_option("--prices", state.prices, "price CSV path");
  ingest->add_option("--out", state.out_dir, "output directory")->required();
  ingest->add_option("--year", state.years, "year (repeatable)");

  const auto add_stage = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd);
    cmd->add_option("--in", state.in_dir, "upstream artifact directory")->required();
    cmd->add_option("--out", state.out_dir, "output directory")->required();
    cmd->add_option("--year", state.years, "year (repeatable)");
    return cmd;
  };
  auto* ggm = add_stage("ggm", "nodewise-lasso partial-correlation network per year");
  auto* centrality = add_stage("centrality", "degree/eigencentrality and spectra per year");
  auto* garch = add_stage("garch", "ARMA-GARCH + DCC correlation matrix per year");
  auto* community = add_stage("community", "RMT-filtered modularity communities per year");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(state);
    if (ingest->parsed()) return ingest_command(state);
    if (ggm->parsed())
      return per_year_command(state, "returns_", ".csv", [&](const auto& cfg, int year) {
        marketnet::stage_ggm_year(cfg, state.in_dir, state.out_dir, year);
      });
    if (centrality->parsed())
      return per_year_command(state, "pcorr_", ".csv", [&](const auto& cfg, int year) {
        static std::vector<marketnet::CentralityReport> reports;
        reports.push_back(marketnet::stage_centrality_year(cfg, state.in_dir, state.out_dir, year));
        marketnet::write_centrality_timeseries_csv(state.out_dir, reports);
      });
    if (garch->parsed())
      return per_year_command(state, "returns_", ".csv", [&](const auto& cfg, int year) {
        marketnet::stage_garch_year(cfg, state.in_dir, state.out_dir, year);
      });
    if (community->parsed())
      return per_year_command(state, "correlation_", ".csv", [&](const auto& cfg, int year) {
        static std::vector<marketnet::ModularityRow> rows;
        const auto r = marketnet::stage_community_year(cfg, state.in_dir, state.out_dir, year);
        rows.insert(rows.end(), r.begin(), r.end());
        marketnet::write_modularity_summary_csv(state.out_dir, rows);
      });
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
