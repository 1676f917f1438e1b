#pragma once

#include <Eigen/Dense>
#include <compare>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace marketnet {

struct Date {
  int y = 0;
  int m = 0;
  int d = 0;
  auto operator<=>(const Date&) const = default;
};

std::optional<Date> parse_date(std::string_view iso);  // YYYY-MM-DD
std::string to_string(const Date& date);

struct DateWindow {
  Date start;
  Date end;
};

DateWindow year_window(int year);

/// Close prices on an irregular date grid. Missing quotes are NaN.
struct PricePanel {
  std::vector<Date> dates;  // strictly increasing
  std::vector<std::string> tickers;
  std::vector<std::string> sectors;  // aligned with tickers, "unknown" when unlabeled
  Eigen::MatrixXd prices;            // dates x tickers

  bool has(Eigen::Index date_idx, Eigen::Index ticker_idx) const;
  std::ptrdiff_t ticker_index(const std::string& ticker) const;
};

/// Complete log-return panel. Row t holds log(S(d_{t+1})/S(d_t)) over the
/// retained date grid; dates[t] is the later date of each ratio.
struct ReturnsPanel {
  std::vector<Date> dates;
  std::vector<std::string> tickers;
  std::vector<std::string> sectors;
  Eigen::MatrixXd returns;  // dates.size() x tickers.size()
};

struct CsvSchema {
  std::string date = "date";
  std::string ticker = "ticker";
  std::string close = "close";
  std::string sector = "sector";  // optional column
};

struct PriceLoad {
  PricePanel panel;
  std::size_t dropped_rows = 0;  // unparsable date/price or non-positive price
  std::size_t duplicates = 0;    // repeated (date,ticker) with equal price
};

// Rows with unparsable dates, unparsable prices, or non-positive prices are
// dropped and counted. Duplicate (date,ticker) cells with equal price are
// merged; conflicting prices are an error.
PriceLoad load_prices(const std::filesystem::path& path, const CsvSchema& schema = {});

// Log returns over the window, on the grid of dates where every ticker has a
// price. Returns span gaps between consecutively retained dates; prices are
// never interpolated.
ReturnsPanel log_returns(const PricePanel& panel, const DateWindow& window);

// Tickers present on strictly more than min_fraction of the window's dates.
std::vector<std::string> filter_completeness(const PricePanel& panel, const DateWindow& window,
                                             double min_fraction = 0.90);

// Drops tickers with any contiguous window_len-block of returns whose sample
// variance falls below min_var.
std::vector<std::string> filter_min_variance(const ReturnsPanel& returns, int window_len = 30,
                                             double min_var = 1e-10);

struct FilterParams {
  double min_fraction = 0.90;
  int window_len = 30;
  double min_var = 1e-10;
};

struct YearWindow {
  int year = 0;
  bool flagged = false;  // degenerate year (no data, < 3 tickers, ...)
  std::string note;
  ReturnsPanel panel;
  std::vector<std::string> dropped_completeness;
  std::vector<std::string> dropped_variance;
  Eigen::Index n_price_dates = 0;
};

// January-to-December windows: completeness filter on prices, then the
// minimum-variance filter on returns, then the aligned survivor panel.
std::vector<YearWindow> yearly_windows(const PricePanel& panel, const std::vector<int>& years,
                                       const FilterParams& params = {});

void write_returns_csv(const std::filesystem::path& path, const ReturnsPanel& panel);
ReturnsPanel read_returns_csv(const std::filesystem::path& path);

}  // namespace marketnet
