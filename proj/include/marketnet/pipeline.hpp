#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "marketnet/centrality.hpp"
#include "marketnet/config.hpp"

namespace marketnet {

struct YearOutcome {
  int year = 0;
  bool ok = false;
  bool flagged = false;  // degenerate year per the ingest filters
  std::string note;      // flag reason or error text
  int tickers_kept = 0;
  std::vector<std::string> warnings;
  double elapsed_ms = 0.0;
};

struct RunManifest {
  nlohmann::json config_snapshot;
  std::vector<YearOutcome> years;
  // Relative artifact path -> FNV-1a 64 checksum, sorted by path.
  std::vector<std::pair<std::string, std::string>> checksums;

  nlohmann::json to_json() const;
};

// Exit codes: 0 all years complete, 2 partial failure, 1 everything failed.
int manifest_exit_code(const RunManifest& manifest);

// Stage entry points; `run` and the per-stage subcommands share these.
struct IngestSummary {
  std::vector<YearWindow> windows;
  std::size_t dropped_rows = 0;
  std::size_t duplicates = 0;
};

IngestSummary stage_ingest(const RunConfig& config, const std::filesystem::path& out_dir);

void stage_ggm_year(const RunConfig& config, const std::filesystem::path& in_dir,
                    const std::filesystem::path& out_dir, int year);

CentralityReport stage_centrality_year(const RunConfig& config,
                                       const std::filesystem::path& in_dir,
                                       const std::filesystem::path& out_dir, int year);

void write_centrality_timeseries_csv(const std::filesystem::path& out_dir,
                                     const std::vector<CentralityReport>& reports);

struct GarchYearResult {
  std::vector<std::string> warnings;
};

GarchYearResult stage_garch_year(const RunConfig& config, const std::filesystem::path& in_dir,
                                 const std::filesystem::path& out_dir, int year);

struct ModularityRow {
  int year = 0;
  std::string objective;
  int n_communities = 0;
  double q = 0.0;
  bool has_group = false;
};

std::vector<ModularityRow> stage_community_year(const RunConfig& config,
                                                const std::filesystem::path& in_dir,
                                                const std::filesystem::path& out_dir, int year);

void write_modularity_summary_csv(const std::filesystem::path& out_dir,
                                  const std::vector<ModularityRow>& rows);

// Years present in a directory, inferred from `<prefix><year><suffix>` names.
std::vector<int> detect_years(const std::filesystem::path& dir, const std::string& prefix,
                              const std::string& suffix);

// Full per-year pipeline: ingest -> ggm -> centrality -> garch -> community,
// with per-year failures isolated. Writes manifest.json into the output dir.
RunManifest run_pipeline(const RunConfig& config);

}  // namespace marketnet
