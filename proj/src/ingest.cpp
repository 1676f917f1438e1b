#include "marketnet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "marketnet/csv.hpp"
#include "marketnet/util.hpp"

namespace marketnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::optional<Date> parse_date(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  Date date;
  if (!parse_int(iso.substr(0, 4), date.y) || !parse_int(iso.substr(5, 2), date.m) ||
      !parse_int(iso.substr(8, 2), date.d))
    return std::nullopt;
  if (date.m < 1 || date.m > 12 || date.d < 1 || date.d > 31) return std::nullopt;
  return date;
}

std::string to_string(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.y, date.m, date.d);
  return buf;
}

DateWindow year_window(int year) { return {{year, 1, 1}, {year, 12, 31}}; }

bool PricePanel::has(Eigen::Index date_idx, Eigen::Index ticker_idx) const {
  return !std::isnan(prices(date_idx, ticker_idx));
}

std::ptrdiff_t PricePanel::ticker_index(const std::string& ticker) const {
  for (std::size_t i = 0; i < tickers.size(); ++i)
    if (tickers[i] == ticker) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

PriceLoad load_prices(const std::filesystem::path& path, const CsvSchema& schema) {
  const auto table = read_csv(path);
  const auto date_col = table.column(schema.date);
  const auto ticker_col = table.column(schema.ticker);
  const auto close_col = table.column(schema.close);
  const auto sector_col = table.column(schema.sector);
  if (date_col < 0 || ticker_col < 0 || close_col < 0)
    throw std::runtime_error("price CSV missing required column (need " + schema.date + ", " +
                             schema.ticker + ", " + schema.close + "): " + path.string());

  PriceLoad out;
  std::map<std::pair<Date, std::string>, double> cells;
  std::map<std::string, std::string> sectors;
  const auto need = static_cast<std::size_t>(std::max({date_col, ticker_col, close_col}));
  for (const auto& row : table.rows) {
    if (row.size() <= need) {
      ++out.dropped_rows;
      continue;
    }
    const auto date = parse_date(row[static_cast<std::size_t>(date_col)]);
    const std::string& ticker = row[static_cast<std::size_t>(ticker_col)];
    double price = kNaN;
    try {
      price = std::stod(row[static_cast<std::size_t>(close_col)]);
    } catch (const std::exception&) {
    }
    if (!date || ticker.empty() || !std::isfinite(price) || price <= 0.0) {
      ++out.dropped_rows;
      continue;
    }
    const auto key = std::make_pair(*date, ticker);
    const auto it = cells.find(key);
    if (it != cells.end()) {
      if (it->second != price)
        throw std::runtime_error("conflicting duplicate price for " + ticker + " on " +
                                 to_string(*date));
      ++out.duplicates;
    } else {
      cells.emplace(key, price);
    }
    if (sector_col >= 0 && row.size() > static_cast<std::size_t>(sector_col)) {
      const std::string& sec = row[static_cast<std::size_t>(sector_col)];
      if (!sec.empty()) sectors.emplace(ticker, sec);  // first label wins
    }
  }
  if (cells.empty()) throw std::runtime_error("zero valid rows in price CSV: " + path.string());

  std::set<Date> date_set;
  std::set<std::string> ticker_set;
  for (const auto& [key, value] : cells) {
    date_set.insert(key.first);
    ticker_set.insert(key.second);
  }
  auto& panel = out.panel;
  panel.dates.assign(date_set.begin(), date_set.end());
  panel.tickers.assign(ticker_set.begin(), ticker_set.end());
  panel.sectors.reserve(panel.tickers.size());
  for (const auto& t : panel.tickers) {
    const auto it = sectors.find(t);
    panel.sectors.push_back(it == sectors.end() ? "unknown" : it->second);
  }
  panel.prices =
      Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(panel.dates.size()),
                                static_cast<Eigen::Index>(panel.tickers.size()), kNaN);
  std::map<Date, Eigen::Index> date_idx;
  for (std::size_t i = 0; i < panel.dates.size(); ++i)
    date_idx[panel.dates[i]] = static_cast<Eigen::Index>(i);
  std::map<std::string, Eigen::Index> ticker_idx;
  for (std::size_t i = 0; i < panel.tickers.size(); ++i)
    ticker_idx[panel.tickers[i]] = static_cast<Eigen::Index>(i);
  for (const auto& [key, price] : cells)
    panel.prices(date_idx[key.first], ticker_idx[key.second]) = price;
  return out;
}

namespace {

std::vector<Eigen::Index> window_date_indices(const PricePanel& panel, const DateWindow& window) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < panel.dates.size(); ++i)
    if (panel.dates[i] >= window.start && panel.dates[i] <= window.end)
      idx.push_back(static_cast<Eigen::Index>(i));
  return idx;
}

PricePanel restrict_tickers(const PricePanel& panel, const std::vector<std::string>& keep) {
  std::set<std::string> keep_set(keep.begin(), keep.end());
  PricePanel out;
  out.dates = panel.dates;
  std::vector<Eigen::Index> cols;
  for (std::size_t i = 0; i < panel.tickers.size(); ++i) {
    if (keep_set.count(panel.tickers[i])) {
      out.tickers.push_back(panel.tickers[i]);
      out.sectors.push_back(panel.sectors[i]);
      cols.push_back(static_cast<Eigen::Index>(i));
    }
  }
  out.prices.resize(panel.prices.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.prices.col(static_cast<Eigen::Index>(j)) = panel.prices.col(cols[j]);
  return out;
}

}  // namespace

ReturnsPanel log_returns(const PricePanel& panel, const DateWindow& window) {
  if (window.end < window.start) throw std::invalid_argument("empty date window");
  const auto idx = window_date_indices(panel, window);
  if (idx.empty()) throw std::runtime_error("window outside panel date range");
  const auto n = static_cast<Eigen::Index>(panel.tickers.size());
  std::vector<Eigen::Index> grid;  // dates where every ticker has a price
  for (const auto i : idx) {
    bool all = true;
    for (Eigen::Index j = 0; j < n && all; ++j) all = panel.has(i, j);
    if (all) grid.push_back(i);
  }
  if (grid.size() < 2) throw std::runtime_error("insufficient overlapping dates in window");

  ReturnsPanel out;
  out.tickers = panel.tickers;
  out.sectors = panel.sectors;
  const auto t = static_cast<Eigen::Index>(grid.size()) - 1;
  out.returns.resize(t, n);
  out.dates.reserve(static_cast<std::size_t>(t));
  for (Eigen::Index r = 0; r < t; ++r) {
    out.dates.push_back(panel.dates[static_cast<std::size_t>(grid[static_cast<std::size_t>(r) + 1])]);
    for (Eigen::Index j = 0; j < n; ++j)
      out.returns(r, j) = std::log(panel.prices(grid[static_cast<std::size_t>(r) + 1], j) /
                                   panel.prices(grid[static_cast<std::size_t>(r)], j));
  }
  return out;
}

std::vector<std::string> filter_completeness(const PricePanel& panel, const DateWindow& window,
                                             double min_fraction) {
  if (!(min_fraction > 0.0 && min_fraction <= 1.0))
    throw std::invalid_argument("min_fraction must lie in (0, 1]");
  const auto idx = window_date_indices(panel, window);
  std::vector<std::string> kept;
  if (idx.empty()) return kept;
  const double threshold = min_fraction * static_cast<double>(idx.size());
  for (std::size_t j = 0; j < panel.tickers.size(); ++j) {
    std::size_t present = 0;
    for (const auto i : idx)
      if (panel.has(i, static_cast<Eigen::Index>(j))) ++present;
    if (static_cast<double>(present) > threshold) kept.push_back(panel.tickers[j]);
  }
  return kept;
}

std::vector<std::string> filter_min_variance(const ReturnsPanel& returns, int window_len,
                                             double min_var) {
  if (min_var < 0.0) throw std::invalid_argument("min_var must be >= 0");
  if (window_len < 2) throw std::invalid_argument("window_len must be >= 2");
  const auto t = returns.returns.rows();
  if (t < window_len) throw std::runtime_error("window too short");
  std::vector<std::string> kept;
  for (std::size_t j = 0; j < returns.tickers.size(); ++j) {
    const auto col = returns.returns.col(static_cast<Eigen::Index>(j));
    bool stale = false;
    for (Eigen::Index start = 0; start + window_len <= t && !stale; ++start) {
      const auto block = col.segment(start, window_len);
      const double mean = block.mean();
      const double var = (block.array() - mean).square().sum() / (window_len - 1);
      if (var < min_var) stale = true;
    }
    if (!stale) kept.push_back(returns.tickers[j]);
  }
  return kept;
}

std::vector<YearWindow> yearly_windows(const PricePanel& panel, const std::vector<int>& years,
                                       const FilterParams& params) {
  std::vector<YearWindow> out;
  out.reserve(years.size());
  for (const int year : years) {
    YearWindow yw;
    yw.year = year;
    const auto window = year_window(year);
    const auto idx = window_date_indices(panel, window);
    yw.n_price_dates = static_cast<Eigen::Index>(idx.size());
    if (idx.empty()) {
      yw.flagged = true;
      yw.note = "no data in year";
      out.push_back(std::move(yw));
      continue;
    }
    const auto survivors1 = filter_completeness(panel, window, params.min_fraction);
    {
      std::set<std::string> kept(survivors1.begin(), survivors1.end());
      for (const auto& t : panel.tickers)
        if (!kept.count(t)) yw.dropped_completeness.push_back(t);
    }
    if (survivors1.size() < 2) {
      yw.flagged = true;
      yw.note = "fewer than 3 tickers";
      out.push_back(std::move(yw));
      continue;
    }
    try {
      const auto sub1 = restrict_tickers(panel, survivors1);
      auto returns1 = log_returns(sub1, window);
      std::vector<std::string> survivors2;
      if (returns1.returns.rows() < params.window_len) {
        yw.flagged = true;
        yw.note = "too few observations for variance filter";
        survivors2 = survivors1;
      } else {
        survivors2 = filter_min_variance(returns1, params.window_len, params.min_var);
        std::set<std::string> kept(survivors2.begin(), survivors2.end());
        for (const auto& t : survivors1)
          if (!kept.count(t)) yw.dropped_variance.push_back(t);
      }
      if (survivors2.size() < 3 && !yw.flagged) {
        yw.flagged = true;
        yw.note = "fewer than 3 tickers";
      }
      if (survivors2.size() >= 2) {
        // Dropping tickers can enlarge the all-present grid, so realign.
        const auto sub2 = restrict_tickers(panel, survivors2);
        yw.panel = log_returns(sub2, window);
      }
    } catch (const std::exception& e) {
      yw.flagged = true;
      yw.note = e.what();
    }
    out.push_back(std::move(yw));
  }
  return out;
}

void write_returns_csv(const std::filesystem::path& path, const ReturnsPanel& panel) {
  std::vector<std::string> header{"date"};
  header.insert(header.end(), panel.tickers.begin(), panel.tickers.end());
  std::vector<std::vector<std::string>> rows;
  rows.reserve(panel.dates.size());
  for (std::size_t t = 0; t < panel.dates.size(); ++t) {
    std::vector<std::string> row{to_string(panel.dates[t])};
    for (Eigen::Index j = 0; j < panel.returns.cols(); ++j)
      row.push_back(fmt_g17(panel.returns(static_cast<Eigen::Index>(t), j)));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

ReturnsPanel read_returns_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  if (table.header.empty() || table.header[0] != "date")
    throw std::runtime_error("not a returns CSV (expected 'date' header): " + path.string());
  ReturnsPanel out;
  out.tickers.assign(table.header.begin() + 1, table.header.end());
  out.sectors.assign(out.tickers.size(), "unknown");
  out.returns.resize(static_cast<Eigen::Index>(table.rows.size()),
                     static_cast<Eigen::Index>(out.tickers.size()));
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    const auto& row = table.rows[t];
    if (row.size() != out.tickers.size() + 1)
      throw std::runtime_error("returns CSV malformed at row " + std::to_string(t + 1));
    const auto date = parse_date(row[0]);
    if (!date) throw std::runtime_error("returns CSV bad date at row " + std::to_string(t + 1));
    out.dates.push_back(*date);
    for (std::size_t j = 0; j < out.tickers.size(); ++j)
      out.returns(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) =
          std::stod(row[j + 1]);
  }
  return out;
}

}  // namespace marketnet
