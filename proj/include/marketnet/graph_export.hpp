#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "marketnet/ggm.hpp"

namespace marketnet {

// GraphML with node attributes `ticker`, `sector` and edge attribute `weight`.
void write_graphml(const std::filesystem::path& path, const PartialCorrNetwork& net);

// DOT: green edges for positive weights, red for negative, penwidth
// proportional to |weight|.
void write_dot(const std::filesystem::path& path, const PartialCorrNetwork& net);

// Dense matrix plus ticker list as JSON.
void write_network_json(const std::filesystem::path& path, const PartialCorrNetwork& net);

// Community GraphML over an arbitrary weighted matrix; only edges with
// |weight| >= min_abs_weight are emitted (an export filter, not a model one).
// Nodes carry community id plus color/shape hints.
void write_community_graphml(const std::filesystem::path& path,
                             const std::vector<std::string>& tickers,
                             const Eigen::MatrixXd& weights, const std::vector<int>& assignment,
                             double min_abs_weight);

std::string xml_escape(const std::string& raw);

}  // namespace marketnet
