#include <cstdio>

#include "mavpoint/rng.hpp"
#include "mavpoint/synth.hpp"

namespace mavpoint {

namespace {

std::map<BlockId, double> random_profile(Rng& rng, const std::string& prefix, std::size_t pool, std::size_t blocks) {
    std::map<BlockId, double> profile;
    double total = 0.0;
    while (profile.size() < blocks) {
        char name[32];
        std::snprintf(name, sizeof name, "%s%03llu", prefix.c_str(),
                      static_cast<unsigned long long>(rng.below(pool)));
        if (profile.count(name)) continue;
        const double w = 0.1 + rng.uniform();
        profile[name] = w;
        total += w;
    }
    for (auto& kv : profile) kv.second /= total;
    return profile;
}

}  // namespace

WorkloadSpec xalanc_like_spec(std::uint64_t seed) {
    // Parser working sets against the default oracle (4096 x 64 B lines,
    // 64 lines per 4 KiB region): 48 regions fit, the rest spill
    // progressively harder.
    constexpr std::uint64_t kParserSets[] = {32, 768, 1728, 512, 2592, 1152};
    constexpr std::uint64_t kParserWindows = 170;
    constexpr std::size_t kTransformerPhases = 24;
    constexpr std::uint64_t kTransformerWindows = 45;

    Rng rng(derive_seed(seed, "xalanc_like"));
    WorkloadSpec spec;
    spec.seed = seed;
    spec.window_size = 100'000;
    spec.granularity_bytes = kDefaultGranularity;

    const auto parser_profile = random_profile(rng, "parse.bb", 64, 12);
    for (std::size_t i = 0; i < std::size(kParserSets); ++i) {
        PhaseSpec phase;
        phase.name = "parser/" + std::to_string(i);
        phase.duration_windows = kParserWindows;
        phase.code_profile = parser_profile;
        phase.mem_op_fraction = 0.35;
        phase.access_pattern = UniformPattern{kParserSets[i], (i + 1) << 20};
        spec.phases.push_back(std::move(phase));
    }
    for (std::size_t i = 0; i < kTransformerPhases; ++i) {
        PhaseSpec phase;
        phase.name = "transformer/" + std::to_string(i);
        phase.duration_windows = kTransformerWindows;
        phase.code_profile = random_profile(rng, "xform.bb", 400, 8 + rng.below(9));
        phase.mem_op_fraction = 0.2 + 0.1 * rng.uniform();
        phase.access_pattern = ZipfPattern{16 + rng.below(33), 0.8 + 0.4 * rng.uniform(), (64 + i) << 20};
        spec.phases.push_back(std::move(phase));
    }
    return spec;
}

}  // namespace mavpoint
