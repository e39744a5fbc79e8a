#include "mavpoint/cache.hpp"

#include "mavpoint/error.hpp"

namespace mavpoint {

void validate(const CacheOracleConfig& cfg) {
    if (cfg.cache_lines == 0) throw ValidationError("oracle: cache_lines must be positive");
    if (cfg.associativity == 0) throw ValidationError("oracle: associativity must be positive");
    if (cfg.line_bytes == 0) throw ValidationError("oracle: line_bytes must be positive");
    if (cfg.cache_lines % cfg.associativity != 0) {
        throw ValidationError("oracle: cache_lines must be divisible by associativity");
    }
    if (!(cfg.base_cpi > 0.0)) throw ValidationError("oracle: base_cpi must be positive");
    if (!(cfg.miss_penalty_cpi > 0.0)) throw ValidationError("oracle: miss_penalty_cpi must be positive");
}

namespace {
const CacheOracleConfig& checked(const CacheOracleConfig& cfg) {
    validate(cfg);
    return cfg;
}
}  // namespace

LruCache::LruCache(const CacheOracleConfig& cfg)
    : sets_(checked(cfg).cache_lines / cfg.associativity),
      ways_(cfg.associativity),
      line_bytes_(cfg.line_bytes),
      tags_(cfg.cache_lines, 0),
      last_use_(cfg.cache_lines, 0) {}

bool LruCache::access(std::uint64_t address) {
    const std::uint64_t line = address / line_bytes_;
    const std::uint64_t tag = line + 1;
    const std::uint64_t base = (line % sets_) * ways_;
    ++clock_;

    std::uint64_t victim = base;
    for (std::uint64_t w = base; w < base + ways_; ++w) {
        if (tags_[w] == tag) {
            last_use_[w] = clock_;
            return true;
        }
        if (last_use_[w] < last_use_[victim]) victim = w;
    }
    tags_[victim] = tag;
    last_use_[victim] = clock_;
    return false;
}

}  // namespace mavpoint
