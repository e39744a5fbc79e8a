#include <doctest.h>

#include <cmath>
#include <list>
#include <numeric>
#include <set>

#include "mavpoint/error.hpp"
#include "mavpoint/features.hpp"
#include "mavpoint/rng.hpp"
#include "mavpoint/synth.hpp"

using namespace mavpoint;

namespace {

PhaseSpec phase(const std::string& name, std::uint64_t windows, AccessPattern pattern, double mem_fraction = 0.3) {
    PhaseSpec p;
    p.name = name;
    p.duration_windows = windows;
    p.code_profile = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
    p.mem_op_fraction = mem_fraction;
    p.access_pattern = pattern;
    return p;
}

WorkloadSpec workload(std::vector<PhaseSpec> phases, std::uint64_t window_size = 20000, std::uint64_t seed = 17) {
    WorkloadSpec spec;
    spec.phases = std::move(phases);
    spec.window_size = window_size;
    spec.seed = seed;
    return spec;
}

double mean_ipc(const WindowSeries& s, std::size_t from, std::size_t to) {
    double sum = 0.0;
    for (std::size_t i = from; i < to; ++i) sum += *s.windows[i].truth_ipc;
    return sum / static_cast<double>(to - from);
}

// Independent LRU reference: one recency list per set.
class ListLru {
public:
    ListLru(std::uint64_t lines, std::uint64_t ways, std::uint64_t line_bytes)
        : sets_(lines / ways), ways_(ways), line_bytes_(line_bytes), lists_(sets_) {}
    bool access(std::uint64_t addr) {
        const std::uint64_t line = addr / line_bytes_;
        auto& l = lists_[line % sets_];
        for (auto it = l.begin(); it != l.end(); ++it) {
            if (*it == line) {
                l.erase(it);
                l.push_front(line);
                return true;
            }
        }
        l.push_front(line);
        if (l.size() > ways_) l.pop_back();
        return false;
    }

private:
    std::uint64_t sets_, ways_, line_bytes_;
    std::vector<std::list<std::uint64_t>> lists_;
};

}  // namespace

TEST_CASE("LruCache agrees with a list-based LRU reference") {
    CacheOracleConfig cfg;
    cfg.cache_lines = 64;
    cfg.associativity = 4;
    LruCache cache(cfg);
    ListLru ref(64, 4, 64);
    Rng rng(5);
    int hits = 0;
    int mismatches = 0;
    for (int i = 0; i < 200000; ++i) {
        const std::uint64_t addr = rng.below(96) * 64 + rng.below(64);
        const bool h = cache.access(addr);
        mismatches += h != ref.access(addr);
        hits += h;
    }
    CHECK(mismatches == 0);
    CHECK(hits > 0);
    CHECK(hits < 200000);
}

TEST_CASE("single region steady state") {
    const auto s = generate(workload({phase("only", 10, UniformPattern{1, 0})}), {});
    REQUIRE(s.size() == 10);
    for (std::size_t i = 1; i < 10; ++i) {
        CHECK(s.windows[i].bbv == s.windows[0].bbv);
        CHECK(s.windows[i].mav == s.windows[0].mav);
        CHECK(*s.windows[i].truth_ipc == *s.windows[1].truth_ipc);
    }
    // Window 0 pays the cold misses for the region's 64 lines.
    CHECK(*s.windows[0].truth_ipc < *s.windows[1].truth_ipc);
    CHECK(*s.windows[1].truth_ipc == doctest::Approx(2.0));
}

TEST_CASE("same seed gives a bit-identical series") {
    const auto spec = workload({phase("u", 4, UniformPattern{100, 0}), phase("z", 4, ZipfPattern{500, 1.1, 7}),
                                phase("s", 4, StridePattern{3, 50, 1000})});
    CHECK(generate(spec, {}) == generate(spec, {}));
    auto other = spec;
    other.seed = 18;
    CHECK_FALSE(generate(other, {}) == generate(spec, {}));
}

TEST_CASE("working set far above cache capacity lowers IPC") {
    CacheOracleConfig oracle;  // 4096 lines
    const auto s = generate(workload({phase("small", 12, UniformPattern{64, 0}),
                                      phase("large", 12, UniformPattern{65536, 1 << 20})}),
                            oracle);
    const double small = mean_ipc(s, 0, 12);
    const double large = mean_ipc(s, 12, 24);
    CHECK(large < small);
    // 64 regions of 64 lines fill the cache exactly; the steady state hits.
    CHECK(*s.windows[11].truth_ipc == doctest::Approx(2.0));
}

TEST_CASE("conservation of counts per window") {
    const auto s = generate(workload({phase("u", 3, UniformPattern{37, 0}, 0.41), phase("z", 3, ZipfPattern{90, 0.7, 0}),
                                      phase("s", 3, StridePattern{5, 13, 0}, 1.0), phase("none", 2, UniformPattern{1, 0}, 0.0)},
                                     12345),
                            {});
    for (const auto& w : s.windows) {
        const auto bbv_sum = std::accumulate(w.bbv.begin(), w.bbv.end(), std::uint64_t{0},
                                             [](std::uint64_t a, const auto& kv) { return a + kv.second; });
        const auto mav_sum = std::accumulate(w.mav.begin(), w.mav.end(), std::uint64_t{0},
                                             [](std::uint64_t a, const auto& kv) { return a + kv.second; });
        CHECK(bbv_sum == w.instr_count);
        CHECK(mav_sum == w.mem_op_count);
    }
    CHECK(s.windows.back().mem_op_count == 0);
    CHECK(s.windows[6].mem_op_count == 12345);
}

TEST_CASE("profile rounding remainder goes to the smallest block id") {
    auto p = phase("r", 1, UniformPattern{1, 0});
    p.code_profile = {{"x", 1.0 / 3.0}, {"y", 1.0 / 3.0}, {"z", 1.0 / 3.0}};
    const auto s = generate(workload({p}, 100), {});
    CHECK(s.windows[0].bbv.at("x") == 34);
    CHECK(s.windows[0].bbv.at("y") == 33);
    CHECK(s.windows[0].bbv.at("z") == 33);
}

TEST_CASE("stride pattern walks the footprint deterministically") {
    const auto s = generate(workload({phase("s", 1, StridePattern{3, 5, 100}, 1.0)}, 10), {});
    // positions 0..9 -> (3p mod 5) = 0,3,1,4,2 repeated twice
    const std::map<RegionId, std::uint64_t> expected{{100, 2}, {101, 2}, {102, 2}, {103, 2}, {104, 2}};
    CHECK(s.windows[0].mav == expected);
}

TEST_CASE("zipf concentrates accesses on low ranks") {
    const auto s = generate(workload({phase("z", 1, ZipfPattern{100, 1.2, 0}, 1.0)}, 100000), {});
    const auto& mav = s.windows[0].mav;
    CHECK(mav.at(0) > mav.at(1));
    CHECK(mav.at(1) > mav.at(9));
    // P(rank 1) = 1 / H(100, 1.2); expected count within 3% of 100000 * P.
    double h = 0.0;
    for (int r = 1; r <= 100; ++r) h += std::pow(r, -1.2);
    CHECK(static_cast<double>(mav.at(0)) == doctest::Approx(100000.0 / h).epsilon(0.03));
}

TEST_CASE("property: enlarging the working set never raises steady-state IPC") {
    double previous = 1e9;
    for (std::uint64_t regions : {8, 16, 32, 64, 96, 128, 256, 1024}) {
        const auto s = generate(workload({phase("w", 8, UniformPattern{regions, 0})}), {});
        const double steady = mean_ipc(s, 3, 8);
        CHECK(steady <= previous + 1e-12);
        previous = steady;
    }
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(validate(WorkloadSpec{}), ValidationError);
    auto bad = phase("bad", 1, UniformPattern{0, 0});
    CHECK_THROWS_AS(validate(workload({bad})), ValidationError);
    auto unnormalized = phase("p", 1, UniformPattern{1, 0});
    unnormalized.code_profile["d"] = 0.1;
    CHECK_THROWS_AS(validate(workload({unnormalized})), ValidationError);
    auto frac = phase("f", 1, UniformPattern{1, 0}, 1.5);
    CHECK_THROWS_AS(validate(workload({frac})), ValidationError);
    CacheOracleConfig odd;
    odd.cache_lines = 4097;
    CHECK_THROWS_AS(validate(odd), ValidationError);
    CHECK_THROWS_AS(LruCache{odd}, ValidationError);
}

TEST_CASE("xalanc-like spec structure") {
    for (std::uint64_t seed : {1, 2, 77}) {
        const WorkloadSpec spec = xalanc_like_spec(seed);
        CHECK_NOTHROW(validate(spec));
        CHECK(total_windows(spec) >= 2000);
        std::vector<const PhaseSpec*> parser, transformer;
        for (const auto& p : spec.phases) (p.name.rfind("parser/", 0) == 0 ? parser : transformer).push_back(&p);
        CHECK(parser.size() >= 4);
        CHECK(transformer.size() >= 4);
        std::set<std::uint64_t> sets;
        for (const auto* p : parser) {
            CHECK(p->code_profile == parser.front()->code_profile);
            CHECK(p->mem_op_fraction == parser.front()->mem_op_fraction);
            REQUIRE(std::holds_alternative<UniformPattern>(p->access_pattern));
            sets.insert(std::get<UniformPattern>(p->access_pattern).working_set_regions);
        }
        CHECK(sets.size() == parser.size());
        std::set<std::map<BlockId, double>> profiles;
        for (const auto* p : transformer) profiles.insert(p->code_profile);
        CHECK(profiles.size() == transformer.size());
        CHECK(xalanc_like_spec(seed) == spec);
    }
}

TEST_CASE("xalanc-like series: identical parser BBVs, distinct parser IPC") {
    const WorkloadSpec spec = xalanc_like_spec(1);
    const WindowSeries s = generate(spec, {});
    const FeatureMatrix bbv = normalize_bbv_rows(bbv_matrix(s));

    std::map<std::string, std::pair<double, int>> ipc;
    std::size_t first_parser = s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string& name = *s.windows[i].phase;
        if (name.rfind("parser/", 0) != 0) continue;
        if (first_parser == s.size()) first_parser = i;
        CHECK(std::equal(bbv.rows.row(i).begin(), bbv.rows.row(i).end(), bbv.rows.row(first_parser).begin()));
        ipc[name].first += *s.windows[i].truth_ipc;
        ipc[name].second += 1;
    }
    double lo = 1e9, hi = 0.0;
    for (const auto& [name, v] : ipc) {
        const double mean = v.first / v.second;
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
    }
    CHECK(ipc.size() >= 4);
    CHECK(hi >= 1.2 * lo);
}
