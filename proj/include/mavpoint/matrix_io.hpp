#pragma once

#include <filesystem>
#include <string>

#include "mavpoint/cluster.hpp"
#include "mavpoint/features.hpp"

namespace mavpoint {

// Feature matrices as CSV: a "# stage=<name>" comment line, then one row per
// window with %.17g reals.
std::string format_matrix_csv(const FeatureMatrix& m);
FeatureMatrix parse_matrix_csv(const std::string& text);
void write_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix read_matrix_csv(const std::filesystem::path& path);

// SimPoint-style text outputs: "<window_index> <cluster_id>" and
// "<weight> <cluster_id>" per line.
std::string format_simpoints(const SimPointSet& sp);
std::string format_weights(const SimPointSet& sp);
SimPointSet parse_simpoints(const std::string& simpoints, const std::string& weights);

// JSON bundle with assignments, centroids, inertia and the selected points.
std::string format_cluster_json(const Clustering& c, const SimPointSet& sp);
void parse_cluster_json(const std::string& text, Clustering& c, SimPointSet& sp);

}  // namespace mavpoint
