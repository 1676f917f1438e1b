#include "marketnet/graph_export.hpp"

#include <fstream>
#include <json.hpp>

#include "marketnet/util.hpp"

namespace marketnet {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  return out;
}

const char* kCommunityColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
const char* kCommunityShapes[] = {"circle", "square", "diamond", "triangle", "hexagon"};

}  // namespace

std::string xml_escape(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (const char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_graphml(const std::filesystem::path& path, const PartialCorrNetwork& net) {
  auto out = open_out(path);
  const auto n = net.P.rows();
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"ticker\" for=\"node\" attr.name=\"ticker\" attr.type=\"string\"/>\n"
      << "  <key id=\"sector\" for=\"node\" attr.name=\"sector\" attr.type=\"string\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <graph id=\"year" << net.year << "\" edgedefault=\"undirected\">\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    out << "    <node id=\"n" << i << "\">"
        << "<data key=\"ticker\">" << xml_escape(net.tickers[static_cast<std::size_t>(i)])
        << "</data>"
        << "<data key=\"sector\">" << xml_escape(net.sectors[static_cast<std::size_t>(i)])
        << "</data></node>\n";
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (net.P(i, j) != 0.0)
        out << "    <edge source=\"n" << i << "\" target=\"n" << j << "\">"
            << "<data key=\"weight\">" << fmt_g17(net.P(i, j)) << "</data></edge>\n";
  out << "  </graph>\n</graphml>\n";
}

void write_dot(const std::filesystem::path& path, const PartialCorrNetwork& net) {
  auto out = open_out(path);
  const auto n = net.P.rows();
  out << "graph year" << net.year << " {\n"
      << "  node [shape=ellipse];\n";
  for (Eigen::Index i = 0; i < n; ++i)
    out << "  \"" << net.tickers[static_cast<std::size_t>(i)] << "\" [sector=\""
        << net.sectors[static_cast<std::size_t>(i)] << "\"];\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = net.P(i, j);
      if (w == 0.0) continue;
      out << "  \"" << net.tickers[static_cast<std::size_t>(i)] << "\" -- \""
          << net.tickers[static_cast<std::size_t>(j)] << "\" [color=" << (w > 0 ? "green" : "red")
          << ", penwidth=" << fmt_fixed(0.5 + 4.0 * std::abs(w), 3) << ", weight=\""
          << fmt_g17(w) << "\"];\n";
    }
  }
  out << "}\n";
}

void write_network_json(const std::filesystem::path& path, const PartialCorrNetwork& net) {
  nlohmann::json j;
  j["year"] = net.year;
  j["tickers"] = net.tickers;
  nlohmann::json sectors = nlohmann::json::object();
  for (std::size_t i = 0; i < net.tickers.size(); ++i) sectors[net.tickers[i]] = net.sectors[i];
  j["sectors"] = sectors;
  nlohmann::json matrix = nlohmann::json::array();
  for (Eigen::Index i = 0; i < net.P.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < net.P.cols(); ++k) row.push_back(net.P(i, k));
    matrix.push_back(std::move(row));
  }
  j["matrix"] = std::move(matrix);
  j["sign_conflicts"] = net.sign_conflicts;
  j["clipped"] = net.clipped;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_community_graphml(const std::filesystem::path& path,
                             const std::vector<std::string>& tickers,
                             const Eigen::MatrixXd& weights, const std::vector<int>& assignment,
                             double min_abs_weight) {
  if (static_cast<Eigen::Index>(tickers.size()) != weights.rows() ||
      tickers.size() != assignment.size())
    throw std::invalid_argument("tickers/weights/assignment size mismatch");
  auto out = open_out(path);
  const auto n = weights.rows();
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"ticker\" for=\"node\" attr.name=\"ticker\" attr.type=\"string\"/>\n"
      << "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n"
      << "  <key id=\"color\" for=\"node\" attr.name=\"color\" attr.type=\"string\"/>\n"
      << "  <key id=\"shape\" for=\"node\" attr.name=\"shape\" attr.type=\"string\"/>\n"
      << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <graph id=\"communities\" edgedefault=\"undirected\">\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    const int community = assignment[static_cast<std::size_t>(i)];
    out << "    <node id=\"n" << i << "\">"
        << "<data key=\"ticker\">" << xml_escape(tickers[static_cast<std::size_t>(i)]) << "</data>"
        << "<data key=\"community\">" << community << "</data>"
        << "<data key=\"color\">" << kCommunityColors[community % 10] << "</data>"
        << "<data key=\"shape\">" << kCommunityShapes[community % 5] << "</data></node>\n";
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(weights(i, j)) >= min_abs_weight)
        out << "    <edge source=\"n" << i << "\" target=\"n" << j << "\">"
            << "<data key=\"weight\">" << fmt_g17(weights(i, j)) << "</data></edge>\n";
  out << "  </graph>\n</graphml>\n";
}

}  // namespace marketnet
