#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace marketnet {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, -1 if absent.
  std::ptrdiff_t column(const std::string& name) const;
};

// Comma-separated, header row required, fields trimmed. Quoting is not
// supported; tickers and sector labels must not contain commas.
CsvTable read_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(const std::string& line);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Dense symmetric-matrix CSV: header "ticker,<t1>,...", one row per ticker,
// values at full round-trip precision.
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& tickers,
                      const Eigen::MatrixXd& m);

struct NamedMatrix {
  std::vector<std::string> tickers;
  Eigen::MatrixXd m;
};
NamedMatrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace marketnet
