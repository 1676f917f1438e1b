#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

// Synthetic multi-year close-price panel: a one-factor market with an index
// series, per-ticker noise, one late-listed ticker and one stale stretch.
namespace fixture {

struct Options {
  std::vector<int> years = {2001, 2002, 2003};
  int n_tickers = 12;      // excluding the index
  bool include_index = true;
  bool late_ticker = true;   // T01 missing through the first year
  bool stale_ticker = true;  // T02 flat for 40 days in the second year
  std::vector<int> corrupt_years;  // keep only two tickers in these years
  std::uint64_t seed = 20010;
};

inline const char* kSectors[] = {"Energy",
                                 "Industry",
                                 "Materials",
                                 "Basic consumming",
                                 "Health",
                                 "Telecommunications",
                                 "Financial services",
                                 "Non basic consumming",
                                 "Information Technologies"};

// 21 trading slots per month, 252 per year.
inline std::vector<std::string> year_dates(int year) {
  std::vector<std::string> out;
  for (int m = 1; m <= 12; ++m) {
    for (int d = 1; d <= 21; ++d) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, m, d);
      out.emplace_back(buf);
    }
  }
  return out;
}

inline void write_price_csv(const std::filesystem::path& path, const Options& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  const int n = opt.n_tickers;
  std::vector<std::string> tickers;
  std::vector<std::string> sectors;
  std::vector<double> beta(static_cast<std::size_t>(n)), sigma(static_cast<std::size_t>(n)),
      level(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    char name[8];
    std::snprintf(name, sizeof(name), "T%02d", j);
    tickers.emplace_back(name);
    sectors.emplace_back(kSectors[j % 9]);
    beta[static_cast<std::size_t>(j)] = 0.6 + 0.8 * uniform(rng);
    sigma[static_cast<std::size_t>(j)] = 0.008 + 0.012 * uniform(rng);
    level[static_cast<std::size_t>(j)] = 20.0 + 80.0 * uniform(rng);
  }
  double index_level = 1000.0;

  std::ofstream out(path);
  out << "date,ticker,close,sector\n";
  char line[160];
  std::vector<double> price = level;
  for (std::size_t yi = 0; yi < opt.years.size(); ++yi) {
    const int year = opt.years[yi];
    const bool corrupt =
        std::find(opt.corrupt_years.begin(), opt.corrupt_years.end(), year) !=
        opt.corrupt_years.end();
    const auto dates = year_dates(year);
    int stale_left = 0;
    for (std::size_t t = 0; t < dates.size(); ++t) {
      const double market = 0.010 * normal(rng);
      if (opt.stale_ticker && yi == 1 && t == 60) stale_left = 40;
      for (int j = 0; j < n; ++j) {
        if (corrupt && j >= 2) continue;
        if (opt.late_ticker && j == 1 && yi == 0) continue;
        const bool stale = opt.stale_ticker && j == 2 && stale_left > 0;
        if (!stale) {
          const double ret = 0.0003 + beta[static_cast<std::size_t>(j)] * market +
                             sigma[static_cast<std::size_t>(j)] * normal(rng);
          price[static_cast<std::size_t>(j)] *= std::exp(ret);
        }
        std::snprintf(line, sizeof(line), "%s,%s,%.6f,%s\n", dates[t].c_str(),
                      tickers[static_cast<std::size_t>(j)].c_str(),
                      price[static_cast<std::size_t>(j)],
                      sectors[static_cast<std::size_t>(j)].c_str());
        out << line;
      }
      if (stale_left > 0) --stale_left;
      if (opt.include_index && !corrupt) {
        index_level *= std::exp(0.0003 + market + 0.002 * normal(rng));
        std::snprintf(line, sizeof(line), "%s,IDX,%.6f,The IPC Index\n", dates[t].c_str(),
                      index_level);
        out << line;
      }
    }
  }
}

inline std::string sample_config(const std::filesystem::path& prices,
                                 const std::filesystem::path& out_dir,
                                 const std::string& years_list, int threads = 1) {
  std::string cfg;
  cfg += "[input]\nprices = " + prices.string() + "\n";
  cfg += "\n[years]\nlist = " + years_list + "\n";
  cfg += "\n[filter]\nmin_fraction = 0.90\nwindow_len = 30\nmin_var = 1e-10\n";
  cfg += "\n[ggm]\ngamma = 0.25\ngrid_size = 50\ngrid_ratio = 0.01\ntol = 1e-7\n";
  cfg += "\n[garch]\nrestarts = 3\ncorrelation_source = rmean\n";
  cfg += "\n[community]\nobjectives = q2,q3\nrestarts = 8\nseed = 1\n";
  cfg += "\n[output]\ndir = " + out_dir.string() + "\n";
  cfg += "\n[run]\nthreads = " + std::to_string(threads) + "\nlog_level = warn\n";
  return cfg;
}

}  // namespace fixture
