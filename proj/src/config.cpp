#include "marketnet/config.hpp"

#include <fstream>
#include <stdexcept>

namespace marketnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    const auto item = trim(s.substr(start, pos == std::string::npos ? pos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad numeric value for " + key + ": '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: bad integer value for " + key + ": '" + value + "'");
  }
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());

  RunConfig cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(line_no) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "input.prices") {
      cfg.prices = value;
    } else if (qual == "input.date_column") {
      cfg.schema.date = value;
    } else if (qual == "input.ticker_column") {
      cfg.schema.ticker = value;
    } else if (qual == "input.close_column") {
      cfg.schema.close = value;
    } else if (qual == "input.sector_column") {
      cfg.schema.sector = value;
    } else if (qual == "years.list") {
      cfg.years.clear();
      for (const auto& item : split_list(value))
        cfg.years.push_back(static_cast<int>(parse_int(qual, item)));
    } else if (qual == "filter.min_fraction") {
      cfg.filter.min_fraction = parse_double(qual, value);
    } else if (qual == "filter.window_len") {
      cfg.filter.window_len = static_cast<int>(parse_int(qual, value));
    } else if (qual == "filter.min_var") {
      cfg.filter.min_var = parse_double(qual, value);
    } else if (qual == "ggm.gamma") {
      cfg.ggm.gamma = parse_double(qual, value);
    } else if (qual == "ggm.grid_size") {
      cfg.ggm.grid_size = static_cast<int>(parse_int(qual, value));
    } else if (qual == "ggm.grid_ratio") {
      cfg.ggm.grid_ratio = parse_double(qual, value);
    } else if (qual == "ggm.tol") {
      cfg.ggm.tol = parse_double(qual, value);
    } else if (qual == "ggm.max_iter") {
      cfg.ggm.max_iter = static_cast<int>(parse_int(qual, value));
    } else if (qual == "centrality.hist_bin_width") {
      cfg.hist_bin_width = parse_double(qual, value);
    } else if (qual == "garch.restarts") {
      cfg.garch.restarts = static_cast<int>(parse_int(qual, value));
    } else if (qual == "garch.tol") {
      cfg.garch.gtol = parse_double(qual, value);
    } else if (qual == "garch.max_iter") {
      cfg.garch.max_iter = static_cast<int>(parse_int(qual, value));
    } else if (qual == "garch.dcc_restarts") {
      cfg.dcc.restarts = static_cast<int>(parse_int(qual, value));
    } else if (qual == "garch.correlation_source") {
      if (value == "rmean")
        cfg.correlation_source = CorrelationSource::kRmean;
      else if (value == "last")
        cfg.correlation_source = CorrelationSource::kLast;
      else if (value == "unconditional")
        cfg.correlation_source = CorrelationSource::kUnconditional;
      else
        throw std::runtime_error("config: correlation_source must be rmean|last|unconditional");
    } else if (qual == "community.objectives") {
      cfg.run_q2 = false;
      cfg.run_q3 = false;
      for (const auto& item : split_list(value)) {
        if (item == "q2")
          cfg.run_q2 = true;
        else if (item == "q3")
          cfg.run_q3 = true;
        else
          throw std::runtime_error("config: unknown objective '" + item + "'");
      }
    } else if (qual == "community.restarts") {
      cfg.community_restarts = static_cast<int>(parse_int(qual, value));
    } else if (qual == "community.seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(qual, value));
    } else if (qual == "community.q2_edge_threshold") {
      cfg.q2_edge_threshold = parse_double(qual, value);
    } else if (qual == "community.q3_edge_threshold") {
      cfg.q3_edge_threshold = parse_double(qual, value);
    } else if (qual == "output.dir") {
      cfg.output_dir = value;
    } else if (qual == "run.threads") {
      cfg.threads = static_cast<int>(parse_int(qual, value));
    } else if (qual == "run.log_level") {
      cfg.log_level = value;
    } else {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" +
                               qual + "'");
    }
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.prices.empty()) throw std::runtime_error("config: input.prices is required");
  if (cfg.years.empty()) throw std::runtime_error("nothing to do: years list is empty");
  if (!(cfg.filter.min_fraction > 0.0 && cfg.filter.min_fraction <= 1.0))
    throw std::runtime_error("config: filter.min_fraction must lie in (0, 1]");
  if (cfg.filter.window_len < 2) throw std::runtime_error("config: filter.window_len must be >= 2");
  if (cfg.filter.min_var < 0.0) throw std::runtime_error("config: filter.min_var must be >= 0");
  if (cfg.ggm.gamma < 0.0) throw std::runtime_error("config: ggm.gamma must be >= 0");
  if (cfg.ggm.grid_size < 1) throw std::runtime_error("config: ggm.grid_size must be >= 1");
  if (!(cfg.ggm.grid_ratio > 0.0 && cfg.ggm.grid_ratio <= 1.0))
    throw std::runtime_error("config: ggm.grid_ratio must lie in (0, 1]");
  if (cfg.ggm.tol <= 0.0) throw std::runtime_error("config: ggm.tol must be > 0");
  if (cfg.hist_bin_width <= 0.0)
    throw std::runtime_error("config: centrality.hist_bin_width must be > 0");
  if (cfg.garch.restarts < 1) throw std::runtime_error("config: garch.restarts must be >= 1");
  if (cfg.dcc.restarts < 1) throw std::runtime_error("config: garch.dcc_restarts must be >= 1");
  if (cfg.community_restarts < 1)
    throw std::runtime_error("config: community.restarts must be >= 1");
  if (cfg.q2_edge_threshold < 0.0 || cfg.q3_edge_threshold < 0.0)
    throw std::runtime_error("config: edge thresholds must be >= 0");
  if (!cfg.run_q2 && !cfg.run_q3)
    throw std::runtime_error("config: at least one community objective is required");
  if (cfg.threads < 0) throw std::runtime_error("config: run.threads must be >= 0");

  std::filesystem::create_directories(cfg.output_dir);
  const auto probe = cfg.output_dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw std::runtime_error("output directory is not writable: " +
                                       cfg.output_dir.string());
  }
  std::filesystem::remove(probe);
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["input"] = {{"prices", cfg.prices.string()},
                {"date_column", cfg.schema.date},
                {"ticker_column", cfg.schema.ticker},
                {"close_column", cfg.schema.close},
                {"sector_column", cfg.schema.sector}};
  j["years"] = cfg.years;
  j["filter"] = {{"min_fraction", cfg.filter.min_fraction},
                 {"window_len", cfg.filter.window_len},
                 {"min_var", cfg.filter.min_var}};
  j["ggm"] = {{"gamma", cfg.ggm.gamma},
              {"grid_size", cfg.ggm.grid_size},
              {"grid_ratio", cfg.ggm.grid_ratio},
              {"tol", cfg.ggm.tol},
              {"max_iter", cfg.ggm.max_iter}};
  j["centrality"] = {{"hist_bin_width", cfg.hist_bin_width}};
  const char* source = cfg.correlation_source == CorrelationSource::kRmean ? "rmean"
                       : cfg.correlation_source == CorrelationSource::kLast ? "last"
                                                                            : "unconditional";
  j["garch"] = {{"restarts", cfg.garch.restarts},
                {"tol", cfg.garch.gtol},
                {"max_iter", cfg.garch.max_iter},
                {"dcc_restarts", cfg.dcc.restarts},
                {"correlation_source", source}};
  j["community"] = {{"q2", cfg.run_q2},
                    {"q3", cfg.run_q3},
                    {"restarts", cfg.community_restarts},
                    {"seed", cfg.seed},
                    {"q2_edge_threshold", cfg.q2_edge_threshold},
                    {"q3_edge_threshold", cfg.q3_edge_threshold}};
  j["output"] = {{"dir", cfg.output_dir.string()}};
  j["run"] = {{"threads", cfg.threads}, {"log_level", cfg.log_level}};
  return j;
}

}  // namespace marketnet
