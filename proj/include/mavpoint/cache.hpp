#pragma once

#include <cstdint>
#include <vector>

namespace mavpoint {

struct CacheOracleConfig {
    std::uint64_t cache_lines = 4096;
    std::uint64_t associativity = 8;
    std::uint64_t line_bytes = 64;
    double base_cpi = 0.5;
    double miss_penalty_cpi = 2.0;

    friend bool operator==(const CacheOracleConfig&, const CacheOracleConfig&) = default;
};

void validate(const CacheOracleConfig& cfg);

// Single-level set-associative cache with true LRU replacement.
class LruCache {
public:
    explicit LruCache(const CacheOracleConfig& cfg);

    // Returns true on a hit. Misses allocate, evicting the LRU way.
    bool access(std::uint64_t address);

    std::uint64_t sets() const { return sets_; }

private:
    std::uint64_t sets_;
    std::uint64_t ways_;
    std::uint64_t line_bytes_;
    std::uint64_t clock_ = 0;
    std::vector<std::uint64_t> tags_;      // sets_ * ways_, line address + 1 (0 = invalid)
    std::vector<std::uint64_t> last_use_;  // sets_ * ways_
};

}  // namespace mavpoint
