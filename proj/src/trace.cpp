#include "mavpoint/trace.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mavpoint/error.hpp"

namespace mavpoint {

namespace {

using nlohmann::json;

bool is_gzip(const std::filesystem::path& path) { return path.extension() == ".gz"; }

std::string window_tag(std::uint64_t index) { return "window " + std::to_string(index) + ": "; }

bool is_count(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

std::uint64_t get_count(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(where + "missing field \"" + key + "\"");
    if (!is_count(*it)) {
        throw ValidationError(where + "field \"" + key + "\" must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

std::uint64_t parse_region_key(const std::string& key, const std::string& where) {
    if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos) {
        throw ValidationError(where + "region-id \"" + key + "\" is not a non-negative integer");
    }
    try {
        return std::stoull(key);
    } catch (const std::out_of_range&) {
        throw ValidationError(where + "region-id \"" + key + "\" exceeds 64 bits");
    }
}

WindowRecord parse_record(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + "record is not a JSON object");
    WindowRecord rec;
    rec.index = get_count(obj, "index", where);
    rec.instr_count = get_count(obj, "instr_count", where);
    rec.mem_op_count = get_count(obj, "mem_op_count", where);

    const auto bbv = obj.find("bbv");
    if (bbv == obj.end() || !bbv->is_object()) throw ValidationError(where + "\"bbv\" must be an object");
    for (const auto& [key, value] : bbv->items()) {
        if (!is_count(value)) {
            throw ValidationError(where + "bbv count for \"" + key + "\" must be a non-negative integer");
        }
        rec.bbv.emplace(key, value.get<std::uint64_t>());
    }

    const auto mav = obj.find("mav");
    if (mav == obj.end() || !mav->is_object()) throw ValidationError(where + "\"mav\" must be an object");
    for (const auto& [key, value] : mav->items()) {
        if (!is_count(value)) {
            throw ValidationError(where + "mav count for \"" + key + "\" must be a non-negative integer");
        }
        rec.mav.emplace(parse_region_key(key, where), value.get<std::uint64_t>());
    }

    if (auto it = obj.find("truth_ipc"); it != obj.end() && !it->is_null()) {
        if (!it->is_number()) throw ValidationError(where + "\"truth_ipc\" must be a number");
        rec.truth_ipc = it->get<double>();
    }
    if (auto it = obj.find("phase"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ValidationError(where + "\"phase\" must be a string");
        rec.phase = it->get<std::string>();
    }
    return rec;
}

void append_json_string(std::string& out, const std::string& s) { out += json(s).dump(); }

}  // namespace

std::string format_real(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void validate(const WindowRecord& rec) {
    const std::string where = window_tag(rec.index);
    if (rec.mem_op_count > rec.instr_count) {
        throw ValidationError(where + "invariant mem_op_count <= instr_count violated (" +
                              std::to_string(rec.mem_op_count) + " > " + std::to_string(rec.instr_count) + ")");
    }
    for (const auto& [block, count] : rec.bbv) {
        if (count == 0) throw ValidationError(where + "invariant violated: bbv entry \"" + block + "\" has zero count");
    }
    std::uint64_t mav_total = 0;
    for (const auto& [region, count] : rec.mav) {
        if (count == 0) {
            throw ValidationError(where + "invariant violated: mav entry " + std::to_string(region) +
                                  " has zero count");
        }
        mav_total += count;
    }
    if (mav_total > rec.mem_op_count) {
        throw ValidationError(where + "invariant sum(mav) <= mem_op_count violated (" + std::to_string(mav_total) +
                              " > " + std::to_string(rec.mem_op_count) + ")");
    }
    if (rec.truth_ipc && !(std::isfinite(*rec.truth_ipc) && *rec.truth_ipc > 0.0)) {
        throw ValidationError(where + "invariant violated: truth_ipc must be a positive finite real");
    }
}

void validate(const WindowSeries& series) {
    if (series.window_size == 0) throw ValidationError("window_size must be positive");
    if (series.granularity_bytes == 0) throw ValidationError("granularity_bytes must be positive");
    if (series.windows.empty()) throw ValidationError("empty series");
    std::uint64_t instr = 0;
    std::uint64_t mem = 0;
    for (std::size_t i = 0; i < series.windows.size(); ++i) {
        const WindowRecord& rec = series.windows[i];
        if (rec.index != i) {
            throw ValidationError(window_tag(rec.index) + "invariant violated: expected consecutive index " +
                                  std::to_string(i));
        }
        validate(rec);
        if (i + 1 < series.windows.size() && rec.instr_count != series.window_size) {
            throw ValidationError(window_tag(rec.index) + "invariant violated: instr_count " +
                                  std::to_string(rec.instr_count) + " != window_size " +
                                  std::to_string(series.window_size) + " (only the last window may be short)");
        }
        if (rec.instr_count > series.window_size) {
            throw ValidationError(window_tag(rec.index) + "invariant violated: instr_count exceeds window_size");
        }
        instr += rec.instr_count;
        mem += rec.mem_op_count;
    }
    if (instr != series.total_instr || mem != series.total_mem_ops) {
        throw ValidationError("header/body totals mismatch: header total_instr=" + std::to_string(series.total_instr) +
                              " total_mem_ops=" + std::to_string(series.total_mem_ops) + ", body total_instr=" +
                              std::to_string(instr) + " total_mem_ops=" + std::to_string(mem));
    }
}

void recompute_totals(WindowSeries& series) {
    series.total_instr = 0;
    series.total_mem_ops = 0;
    for (const auto& w : series.windows) {
        series.total_instr += w.instr_count;
        series.total_mem_ops += w.mem_op_count;
    }
}

WindowSeries parse_series(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    WindowSeries series;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(where + "malformed JSON (" + e.what() + ")");
        }
        if (!have_header) {
            if (!obj.is_object()) throw ValidationError(where + "header is not a JSON object");
            auto schema = obj.find("schema");
            if (schema == obj.end() || !schema->is_string() || schema->get<std::string>() != kTraceSchema) {
                throw ValidationError(where + "header schema must be \"" + std::string(kTraceSchema) + "\"");
            }
            series.window_size = get_count(obj, "window_size", where);
            series.granularity_bytes = get_count(obj, "granularity_bytes", where);
            series.total_instr = get_count(obj, "total_instr", where);
            series.total_mem_ops = get_count(obj, "total_mem_ops", where);
            have_header = true;
            continue;
        }
        series.windows.push_back(parse_record(obj, where));
    }
    if (!have_header) throw ValidationError("missing header line");
    validate(series);
    return series;
}

std::string format_series(const WindowSeries& series) {
    std::string out;
    out += "{\"schema\":\"";
    out += kTraceSchema;
    out += "\",\"window_size\":" + std::to_string(series.window_size) +
           ",\"granularity_bytes\":" + std::to_string(series.granularity_bytes) +
           ",\"total_instr\":" + std::to_string(series.total_instr) +
           ",\"total_mem_ops\":" + std::to_string(series.total_mem_ops) + "}\n";
    for (const auto& rec : series.windows) {
        out += "{\"index\":" + std::to_string(rec.index) + ",\"instr_count\":" + std::to_string(rec.instr_count) +
               ",\"mem_op_count\":" + std::to_string(rec.mem_op_count) + ",\"bbv\":{";
        bool first = true;
        for (const auto& [block, count] : rec.bbv) {
            if (!first) out += ',';
            first = false;
            append_json_string(out, block);
            out += ':' + std::to_string(count);
        }
        out += "},\"mav\":{";
        first = true;
        for (const auto& [region, count] : rec.mav) {
            if (!first) out += ',';
            first = false;
            out += '"' + std::to_string(region) + "\":" + std::to_string(count);
        }
        out += '}';
        if (rec.truth_ipc) out += ",\"truth_ipc\":" + format_real(*rec.truth_ipc);
        if (rec.phase) {
            out += ",\"phase\":";
            append_json_string(out, *rec.phase);
        }
        out += "}\n";
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
    if (is_gzip(path)) {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (gz == nullptr) throw IoError("cannot open " + path.string());
        std::string text;
        char buf[1 << 16];
        int n = 0;
        while ((n = gzread(gz, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
        const bool failed = n < 0;
        gzclose(gz);
        if (failed) throw IoError("gzip read failed: " + path.string());
        return text;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (is_gzip(path)) {
        gzFile gz = gzopen(path.c_str(), "wb9");
        if (gz == nullptr) throw IoError("cannot open " + path.string() + " for writing");
        const int written = text.empty() ? 0 : gzwrite(gz, text.data(), static_cast<unsigned>(text.size()));
        if (gzclose(gz) != Z_OK || written != static_cast<int>(text.size())) {
            throw IoError("gzip write failed: " + path.string());
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

WindowSeries read_series(const std::filesystem::path& path) { return parse_series(read_text_file(path)); }

void write_series(const WindowSeries& series, const std::filesystem::path& path) {
    validate(series);
    write_text_file(path, format_series(series));
}

}  // namespace mavpoint
