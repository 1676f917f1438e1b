#include "marketnet/csv.hpp"

#include <fstream>
#include <stdexcept>

#include "marketnet/util.hpp"

namespace marketnet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::ptrdiff_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
  return -1;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV file: " + path.string());
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) throw std::runtime_error("empty CSV file: " + path.string());
  return table;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write CSV file: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& tickers,
                      const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != tickers.size())
    throw std::invalid_argument("matrix/ticker size mismatch");
  std::vector<std::string> header{"ticker"};
  header.insert(header.end(), tickers.begin(), tickers.end());
  std::vector<std::vector<std::string>> rows;
  rows.reserve(tickers.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{tickers[static_cast<std::size_t>(i)]};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(fmt_g17(m(i, j)));
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

NamedMatrix read_matrix_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  if (table.header.size() < 2 || table.header[0] != "ticker")
    throw std::runtime_error("not a matrix CSV (expected 'ticker' header): " + path.string());
  NamedMatrix out;
  out.tickers.assign(table.header.begin() + 1, table.header.end());
  const auto n = out.tickers.size();
  if (table.rows.size() != n)
    throw std::runtime_error("matrix CSV row/column count mismatch: " + path.string());
  out.m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = table.rows[i];
    if (row.size() != n + 1 || row[0] != out.tickers[i])
      throw std::runtime_error("matrix CSV malformed at row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < n; ++j)
      out.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::stod(row[j + 1]);
  }
  return out;
}

}  // namespace marketnet
