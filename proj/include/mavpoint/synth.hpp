#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mavpoint/cache.hpp"
#include "mavpoint/trace.hpp"

namespace mavpoint {

// Region index distributions; they model the index array b in a[b[i]].
struct UniformPattern {
    std::uint64_t working_set_regions = 1;
    std::uint64_t base_region = 0;
    friend bool operator==(const UniformPattern&, const UniformPattern&) = default;
};

struct ZipfPattern {
    std::uint64_t working_set_regions = 1;
    double exponent = 1.0;
    std::uint64_t base_region = 0;
    friend bool operator==(const ZipfPattern&, const ZipfPattern&) = default;
};

struct StridePattern {
    std::uint64_t stride_regions = 1;
    std::uint64_t footprint_regions = 1;
    std::uint64_t base_region = 0;
    friend bool operator==(const StridePattern&, const StridePattern&) = default;
};

using AccessPattern = std::variant<UniformPattern, ZipfPattern, StridePattern>;

struct PhaseSpec {
    std::string name;
    std::uint64_t duration_windows = 1;
    std::map<BlockId, double> code_profile;  // relative frequencies summing to 1
    double mem_op_fraction = 0.0;
    AccessPattern access_pattern = UniformPattern{};
    friend bool operator==(const PhaseSpec&, const PhaseSpec&) = default;
};

struct WorkloadSpec {
    std::vector<PhaseSpec> phases;
    std::uint64_t window_size = kDefaultWindowSize;
    std::uint64_t granularity_bytes = kDefaultGranularity;
    std::uint64_t seed = 0;
    friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

void validate(const WorkloadSpec& spec);

std::uint64_t total_windows(const WorkloadSpec& spec);

// Expands a workload into a trace. Every memory access is also replayed
// through an LRU cache (state carried across windows) to produce truth_ipc:
//   ipc = 1 / (base_cpi + misses / instr_count * miss_penalty_cpi)
// Each window's `phase` field carries its PhaseSpec name.
WindowSeries generate(const WorkloadSpec& spec, const CacheOracleConfig& oracle);

// Canned workload mimicking a parser/transformer program: the parser region
// runs one code profile over several data working sets, the transformer tail
// varies its code. Phase names are "parser/<n>" and "transformer/<n>".
WorkloadSpec xalanc_like_spec(std::uint64_t seed);

}  // namespace mavpoint
