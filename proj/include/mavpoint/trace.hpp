#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mavpoint {

inline constexpr const char* kTraceSchema = "mavpoint-trace-v1";
inline constexpr std::uint64_t kDefaultWindowSize = 10'000'000;
inline constexpr std::uint64_t kDefaultGranularity = 4096;

using BlockId = std::string;
using RegionId = std::uint64_t;

// One instruction window: basic-block histogram, memory-region histogram and
// the oracle metrics recorded for it. Zero counts are never stored.
struct WindowRecord {
    std::uint64_t index = 0;
    std::uint64_t instr_count = 0;
    std::uint64_t mem_op_count = 0;
    std::map<BlockId, std::uint64_t> bbv;
    std::map<RegionId, std::uint64_t> mav;
    std::optional<double> truth_ipc;
    // Ground-truth phase label; set by the synthetic generator, absent in
    // traces collected elsewhere.
    std::optional<std::string> phase;

    friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

struct WindowSeries {
    std::vector<WindowRecord> windows;
    std::uint64_t window_size = kDefaultWindowSize;
    std::uint64_t granularity_bytes = kDefaultGranularity;
    std::uint64_t total_instr = 0;
    std::uint64_t total_mem_ops = 0;

    std::size_t size() const { return windows.size(); }

    friend bool operator==(const WindowSeries&, const WindowSeries&) = default;
};

// Throws ValidationError naming the offending window and invariant.
void validate(const WindowRecord& record);
void validate(const WindowSeries& series);

// Recomputes total_instr/total_mem_ops from the windows.
void recompute_totals(WindowSeries& series);

// JSON-lines trace I/O. Paths ending in ".gz" are gzip-compressed.
WindowSeries read_series(const std::filesystem::path& path);
void write_series(const WindowSeries& series, const std::filesystem::path& path);

// Text-level entry points used by the file functions.
WindowSeries parse_series(const std::string& text);
std::string format_series(const WindowSeries& series);

// Whole-file helpers shared by the other file formats.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// printf("%.17g") rendering used by every text output.
std::string format_real(double value);

}  // namespace mavpoint
