#include "mavpoint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mavpoint/error.hpp"
#include "mavpoint/rng.hpp"

namespace mavpoint {

namespace {

// Draws region ids for one phase. Stride position persists across the
// windows of a phase; zipf uses inverse-CDF over a precomputed table.
class RegionSampler {
public:
    explicit RegionSampler(const AccessPattern& pattern) : pattern_(pattern) {
        if (const auto* z = std::get_if<ZipfPattern>(&pattern_)) {
            cdf_.resize(z->working_set_regions);
            double acc = 0.0;
            for (std::uint64_t r = 0; r < z->working_set_regions; ++r) {
                acc += std::pow(static_cast<double>(r + 1), -z->exponent);
                cdf_[r] = acc;
            }
            for (double& c : cdf_) c /= acc;
            cdf_.back() = 1.0;
        }
    }

    RegionId next(Rng& rng) {
        return std::visit(
            [&](const auto& p) -> RegionId {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, UniformPattern>) {
                    return p.base_region + rng.below(p.working_set_regions);
                } else if constexpr (std::is_same_v<P, ZipfPattern>) {
                    const double u = rng.uniform();
                    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
                    const auto rank = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(
                        it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
                    return p.base_region + rank;
                } else {
                    const RegionId r = p.base_region + (position_ * p.stride_regions) % p.footprint_regions;
                    ++position_;
                    return r;
                }
            },
            pattern_);
    }

private:
    AccessPattern pattern_;
    std::vector<double> cdf_;
    std::uint64_t position_ = 0;
};

std::map<BlockId, std::uint64_t> scale_profile(const std::map<BlockId, double>& profile, std::uint64_t instr) {
    std::map<BlockId, std::uint64_t> counts;
    std::uint64_t assigned = 0;
    for (const auto& [block, freq] : profile) {
        const auto c = static_cast<std::uint64_t>(std::floor(freq * static_cast<double>(instr)));
        counts[block] = c;
        assigned += c;
    }
    // Floor never overshoots (up to rounding in freq*instr); clamp just in case.
    if (assigned > instr) {
        for (auto it = counts.rbegin(); it != counts.rend() && assigned > instr; ++it) {
            const std::uint64_t take = std::min(it->second, assigned - instr);
            it->second -= take;
            assigned -= take;
        }
    }
    if (!counts.empty()) counts.begin()->second += instr - assigned;
    std::erase_if(counts, [](const auto& kv) { return kv.second == 0; });
    return counts;
}

std::uint64_t pattern_regions(const AccessPattern& pattern) {
    return std::visit(
        [](const auto& p) -> std::uint64_t {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, StridePattern>) {
                return p.footprint_regions;
            } else {
                return p.working_set_regions;
            }
        },
        pattern);
}

}  // namespace

void validate(const WorkloadSpec& spec) {
    if (spec.phases.empty()) throw ValidationError("workload: at least one phase is required");
    if (spec.window_size == 0) throw ValidationError("workload: window_size must be positive");
    if (spec.granularity_bytes == 0) throw ValidationError("workload: granularity_bytes must be positive");
    for (const auto& phase : spec.phases) {
        const std::string where = "workload phase \"" + phase.name + "\": ";
        if (phase.duration_windows == 0) throw ValidationError(where + "duration_windows must be positive");
        if (!(phase.mem_op_fraction >= 0.0 && phase.mem_op_fraction <= 1.0)) {
            throw ValidationError(where + "mem_op_fraction must lie in [0,1]");
        }
        if (phase.code_profile.empty()) throw ValidationError(where + "code_profile is empty");
        double sum = 0.0;
        for (const auto& [block, freq] : phase.code_profile) {
            if (!(freq >= 0.0) || !std::isfinite(freq)) {
                throw ValidationError(where + "code_profile frequency for \"" + block + "\" must be non-negative");
            }
            sum += freq;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ValidationError(where + "code_profile frequencies must sum to 1");
        if (pattern_regions(phase.access_pattern) == 0) {
            throw ValidationError(where + "access pattern must cover at least one region");
        }
        if (const auto* z = std::get_if<ZipfPattern>(&phase.access_pattern); z && !(z->exponent > 0.0)) {
            throw ValidationError(where + "zipf exponent must be positive");
        }
        if (const auto* s = std::get_if<StridePattern>(&phase.access_pattern); s && s->stride_regions == 0) {
            throw ValidationError(where + "stride_regions must be positive");
        }
    }
}

std::uint64_t total_windows(const WorkloadSpec& spec) {
    std::uint64_t n = 0;
    for (const auto& p : spec.phases) n += p.duration_windows;
    return n;
}

WindowSeries generate(const WorkloadSpec& spec, const CacheOracleConfig& oracle) {
    validate(spec);
    validate(oracle);

    WindowSeries series;
    series.window_size = spec.window_size;
    series.granularity_bytes = spec.granularity_bytes;
    series.windows.reserve(total_windows(spec));

    Rng rng(spec.seed);
    LruCache cache(oracle);
    const std::uint64_t lines_per_region = std::max<std::uint64_t>(1, spec.granularity_bytes / oracle.line_bytes);
    // Per region: running line cursor (whole trace) and count in this window.
    struct RegionState {
        std::uint64_t cursor = 0;
        std::uint64_t window_count = 0;
    };
    std::unordered_map<RegionId, RegionState> regions;
    std::vector<RegionId> touched;

    for (const auto& phase : spec.phases) {
        RegionSampler sampler(phase.access_pattern);
        const auto bbv = scale_profile(phase.code_profile, spec.window_size);
        for (std::uint64_t w = 0; w < phase.duration_windows; ++w) {
            WindowRecord rec;
            rec.index = series.windows.size();
            rec.instr_count = spec.window_size;
            rec.mem_op_count = std::min<std::uint64_t>(
                spec.window_size,
                static_cast<std::uint64_t>(std::llround(phase.mem_op_fraction * static_cast<double>(spec.window_size))));
            rec.bbv = bbv;
            rec.phase = phase.name;

            touched.clear();
            std::uint64_t misses = 0;
            for (std::uint64_t a = 0; a < rec.mem_op_count; ++a) {
                const RegionId region = sampler.next(rng);
                RegionState& st = regions[region];
                if (st.window_count++ == 0) touched.push_back(region);
                const std::uint64_t line = st.cursor++ % lines_per_region;
                const std::uint64_t address = region * spec.granularity_bytes + line * oracle.line_bytes;
                if (!cache.access(address)) ++misses;
            }
            std::sort(touched.begin(), touched.end());
            for (RegionId region : touched) {
                RegionState& st = regions[region];
                rec.mav.emplace_hint(rec.mav.end(), region, st.window_count);
                st.window_count = 0;
            }

            const double misses_per_instr = static_cast<double>(misses) / static_cast<double>(rec.instr_count);
            rec.truth_ipc = 1.0 / (oracle.base_cpi + misses_per_instr * oracle.miss_penalty_cpi);
            series.windows.push_back(std::move(rec));
        }
    }
    recompute_totals(series);
    return series;
}

}  // namespace mavpoint
