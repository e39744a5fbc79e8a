#include "mavpoint/config.hpp"

#include "mavpoint/error.hpp"
#include "mavpoint/trace.hpp"

namespace mavpoint {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& section) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) throw ValidationError(section + ": missing required field \"" + key + "\"");
    return *it;
}

template <typename T>
T read_or(const json& j, const char* key, T fallback, const std::string& section) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ValidationError(section + ": field \"" + key + "\" has the wrong type");
    }
}

template <typename T>
T read_required(const json& j, const char* key, const std::string& section) {
    try {
        return require(j, key, section).get<T>();
    } catch (const json::type_error&) {
        throw ValidationError(section + ": field \"" + key + "\" has the wrong type");
    }
}

bool is_non_negative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t read_count(const json& j, const char* key, std::uint64_t fallback, const std::string& section) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!is_non_negative_integer(*it)) {
        throw ValidationError(section + ": field \"" + key + "\" must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

std::uint64_t read_seed(const json& j, const char* key, const std::string& section) {
    const json& v = require(j, key, section);
    if (!is_non_negative_integer(v)) throw ValidationError(section + ": \"" + key + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

AccessPattern parse_pattern(const json& j, const std::string& where) {
    const auto kind = read_required<std::string>(j, "kind", where);
    if (kind == "uniform") {
        return UniformPattern{read_count(j, "working_set_regions", 0, where), read_count(j, "base_region", 0, where)};
    }
    if (kind == "zipf") {
        return ZipfPattern{read_count(j, "working_set_regions", 0, where), read_or<double>(j, "exponent", 1.0, where),
                           read_count(j, "base_region", 0, where)};
    }
    if (kind == "stride") {
        return StridePattern{read_count(j, "stride_regions", 0, where), read_count(j, "footprint_regions", 0, where),
                             read_count(j, "base_region", 0, where)};
    }
    throw ValidationError(where + ": unknown access pattern kind \"" + kind + "\"");
}

json pattern_to_json(const AccessPattern& pattern) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, UniformPattern>) {
                return {{"kind", "uniform"}, {"working_set_regions", p.working_set_regions},
                        {"base_region", p.base_region}};
            } else if constexpr (std::is_same_v<P, ZipfPattern>) {
                return {{"kind", "zipf"}, {"working_set_regions", p.working_set_regions},
                        {"exponent", p.exponent}, {"base_region", p.base_region}};
            } else {
                return {{"kind", "stride"}, {"stride_regions", p.stride_regions},
                        {"footprint_regions", p.footprint_regions}, {"base_region", p.base_region}};
            }
        },
        pattern);
}

}  // namespace

WorkloadSpec parse_workload(const json& j) {
    const std::string section = "workload";
    if (!j.is_object()) throw ValidationError("workload: expected an object");
    const std::uint64_t seed = read_seed(j, "seed", section);
    if (j.contains("preset")) {
        const auto preset = read_required<std::string>(j, "preset", section);
        if (preset != "xalanc_like") throw ValidationError("workload: unknown preset \"" + preset + "\"");
        return xalanc_like_spec(seed);
    }
    WorkloadSpec spec;
    spec.seed = seed;
    spec.window_size = read_count(j, "window_size", kDefaultWindowSize, section);
    spec.granularity_bytes = read_count(j, "granularity_bytes", kDefaultGranularity, section);
    const json& phases = require(j, "phases", section);
    if (!phases.is_array()) throw ValidationError("workload: \"phases\" must be an array");
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const json& p = phases[i];
        const std::string where = "workload phase " + std::to_string(i);
        PhaseSpec phase;
        phase.name = read_required<std::string>(p, "name", where);
        phase.duration_windows = read_count(p, "duration_windows", 0, where);
        phase.mem_op_fraction = read_required<double>(p, "mem_op_fraction", where);
        const json& profile = require(p, "code_profile", where);
        if (!profile.is_object()) throw ValidationError(where + ": code_profile must be an object");
        for (const auto& [block, freq] : profile.items()) {
            if (!freq.is_number()) throw ValidationError(where + ": code_profile values must be numbers");
            phase.code_profile[block] = freq.get<double>();
        }
        phase.access_pattern = parse_pattern(require(p, "access_pattern", where), where);
        spec.phases.push_back(std::move(phase));
    }
    validate(spec);
    return spec;
}

json workload_to_json(const WorkloadSpec& spec) {
    json phases = json::array();
    for (const auto& p : spec.phases) {
        json profile = json::object();
        for (const auto& [block, freq] : p.code_profile) profile[block] = freq;
        phases.push_back({{"name", p.name},
                          {"duration_windows", p.duration_windows},
                          {"mem_op_fraction", p.mem_op_fraction},
                          {"code_profile", profile},
                          {"access_pattern", pattern_to_json(p.access_pattern)}});
    }
    return {{"window_size", spec.window_size},
            {"granularity_bytes", spec.granularity_bytes},
            {"seed", spec.seed},
            {"phases", phases}};
}

CacheOracleConfig parse_oracle(const json& j) {
    const std::string section = "oracle";
    CacheOracleConfig cfg;
    cfg.cache_lines = read_count(j, "cache_lines", cfg.cache_lines, section);
    cfg.associativity = read_count(j, "associativity", cfg.associativity, section);
    cfg.line_bytes = read_count(j, "line_bytes", cfg.line_bytes, section);
    cfg.base_cpi = read_or<double>(j, "base_cpi", cfg.base_cpi, section);
    cfg.miss_penalty_cpi = read_or<double>(j, "miss_penalty_cpi", cfg.miss_penalty_cpi, section);
    validate(cfg);
    return cfg;
}

PipelineConfig parse_pipeline(const json& j) {
    const std::string section = "pipeline";
    PipelineConfig cfg;
    cfg.projection_seed = read_seed(j, "projection_seed", section);
    cfg.decay_lambda = read_or<double>(j, "decay_lambda", cfg.decay_lambda, section);
    cfg.decay_horizon = read_count(j, "decay_horizon", cfg.decay_horizon, section);
    cfg.projected_dim = read_count(j, "projected_dim", cfg.projected_dim, section);
    cfg.distance_metric = metric_from_string(read_or<std::string>(j, "distance_metric", "euclidean", section));
    if (const auto it = j.find("mav_length_cap"); it != j.end() && !it->is_null()) {
        cfg.mav_length_cap = read_count(j, "mav_length_cap", 0, section);
    }
    validate(cfg);
    return cfg;
}

ClusterConfig parse_cluster(const json& j) {
    const std::string section = "cluster";
    ClusterConfig cfg;
    cfg.seed = read_seed(j, "seed", section);
    cfg.k = read_count(j, "k", cfg.k, section);
    cfg.restarts = read_count(j, "restarts", cfg.restarts, section);
    cfg.k_max = read_count(j, "k_max", cfg.k_max, section);
    cfg.bic_threshold = read_or<double>(j, "bic_threshold", cfg.bic_threshold, section);
    if (cfg.k == 0) throw ValidationError("cluster: k must be positive");
    if (cfg.restarts == 0) throw ValidationError("cluster: restarts must be positive");
    if (!(cfg.bic_threshold >= 0.0 && cfg.bic_threshold <= 1.0)) {
        throw ValidationError("cluster: bic_threshold must lie in [0,1]");
    }
    return cfg;
}

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    RunConfig cfg;
    if (j.contains("workload")) cfg.workload = parse_workload(j["workload"]);
    if (j.contains("oracle")) cfg.oracle = parse_oracle(j["oracle"]);
    if (j.contains("pipeline")) cfg.pipeline = parse_pipeline(j["pipeline"]);
    if (j.contains("cluster")) cfg.cluster = parse_cluster(j["cluster"]);
    if (j.contains("recurrence")) {
        const json& r = j["recurrence"];
        cfg.recurrence.max_dim = read_count(r, "max_dim", cfg.recurrence.max_dim, "recurrence");
        if (cfg.recurrence.max_dim == 0) throw ValidationError("recurrence: max_dim must be positive");
        cfg.recurrence.metric = metric_from_string(read_or<std::string>(r, "metric", "euclidean", "recurrence"));
    }
    if (j.contains("output_dir")) cfg.output_dir = read_required<std::string>(j, "output_dir", "config");
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": malformed JSON (" + e.what() + ")");
    }
    return parse_run_config(j);
}

}  // namespace mavpoint
