#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "marketnet/garch.hpp"
#include "marketnet/ggm.hpp"
#include "marketnet/ingest.hpp"

namespace marketnet {

struct RunConfig {
  // [input]
  std::filesystem::path prices;
  CsvSchema schema;

  // [years]
  std::vector<int> years;

  // [filter]
  FilterParams filter;

  // [ggm]
  GgmParams ggm;

  // [centrality]
  double hist_bin_width = 0.1;

  // [garch]
  GarchOptions garch;
  DccOptions dcc;
  CorrelationSource correlation_source = CorrelationSource::kRmean;

  // [community]
  bool run_q2 = true;
  bool run_q3 = true;
  int community_restarts = 8;
  std::uint64_t seed = 1;
  double q2_edge_threshold = 0.30;
  double q3_edge_threshold = 0.05;

  // [output]
  std::filesystem::path output_dir = "out";

  // [run]
  int threads = 0;  // 0 = all cores
  std::string log_level = "info";
};

// Key-value file with [section] headers; '#' starts a comment. Unknown keys
// are an error so typos do not silently fall back to defaults.
RunConfig load_config(const std::filesystem::path& path);

// Range checks; creates the output directory and verifies it is writable.
void validate_config(const RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);

}  // namespace marketnet
