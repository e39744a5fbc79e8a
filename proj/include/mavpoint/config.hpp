#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mavpoint/cache.hpp"
#include "mavpoint/features.hpp"
#include "mavpoint/synth.hpp"

namespace mavpoint {

struct ClusterConfig {
    std::uint64_t k = 30;
    std::uint64_t seed = 0;
    std::uint64_t restarts = 5;
    std::uint64_t k_max = 30;
    double bic_threshold = 0.9;
};

struct RecurrenceConfig {
    std::uint64_t max_dim = 500;
    Metric metric = Metric::euclidean;
};

// One JSON file drives every command. Each section is optional in the file;
// commands demand the sections they use. Seeds have no defaults.
struct RunConfig {
    std::optional<WorkloadSpec> workload;
    CacheOracleConfig oracle;
    std::optional<PipelineConfig> pipeline;
    std::optional<ClusterConfig> cluster;
    RecurrenceConfig recurrence;
    std::optional<std::string> output_dir;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

WorkloadSpec parse_workload(const nlohmann::json& j);
nlohmann::json workload_to_json(const WorkloadSpec& spec);
CacheOracleConfig parse_oracle(const nlohmann::json& j);
PipelineConfig parse_pipeline(const nlohmann::json& j);
ClusterConfig parse_cluster(const nlohmann::json& j);

}  // namespace mavpoint
