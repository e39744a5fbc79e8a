#include "mavpoint/matrix_io.hpp"

#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>

#include "mavpoint/error.hpp"
#include "mavpoint/trace.hpp"

namespace mavpoint {

namespace {

double parse_real(const std::string& cell, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != cell.size() || !std::isfinite(v)) {
        throw ValidationError("matrix csv line " + std::to_string(line_no) + ": bad value \"" + cell + "\"");
    }
    return v;
}

}  // namespace

std::string format_matrix_csv(const FeatureMatrix& m) {
    std::string out = std::string("# stage=") + to_string(m.stage) + "\n";
    for (std::size_t i = 0; i < m.n_windows(); ++i) {
        const auto row = m.rows.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_real(row[j]);
        }
        out += '\n';
    }
    return out;
}

FeatureMatrix parse_matrix_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    Stage stage = Stage::combined;
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("stage=");
            if (pos != std::string::npos) stage = stage_from_string(line.substr(pos + 6));
            continue;
        }
        std::size_t count = 0;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            values.push_back(parse_real(line.substr(start, comma - start), line_no));
            ++count;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows == 0) cols = count;
        if (count != cols) {
            throw ValidationError("matrix csv line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                                  " columns, got " + std::to_string(count));
        }
        ++rows;
    }
    if (rows == 0) throw ValidationError("matrix csv has no rows");
    FeatureMatrix m{Matrix(rows, cols), stage};
    m.rows.data() = std::move(values);
    return m;
}

void write_matrix_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    write_text_file(path, format_matrix_csv(m));
}

FeatureMatrix read_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(read_text_file(path)); }

std::string format_simpoints(const SimPointSet& sp) {
    std::string out;
    for (const auto& p : sp.points) out += std::to_string(p.window_index) + ' ' + std::to_string(p.cluster_id) + '\n';
    return out;
}

std::string format_weights(const SimPointSet& sp) {
    std::string out;
    for (const auto& p : sp.points) out += format_real(p.weight) + ' ' + std::to_string(p.cluster_id) + '\n';
    return out;
}

SimPointSet parse_simpoints(const std::string& simpoints, const std::string& weights) {
    std::map<std::uint32_t, std::size_t> index_of;
    std::istringstream sin(simpoints);
    std::size_t window = 0;
    std::uint32_t cid = 0;
    while (sin >> window >> cid) index_of[cid] = window;
    if (!sin.eof()) throw ValidationError("malformed simpoints file");

    std::map<std::uint32_t, double> weight_of;
    std::istringstream win(weights);
    double w = 0.0;
    while (win >> w >> cid) weight_of[cid] = w;
    if (!win.eof()) throw ValidationError("malformed weights file");

    SimPointSet sp;
    for (const auto& [c, idx] : index_of) {
        const auto it = weight_of.find(c);
        if (it == weight_of.end()) throw ValidationError("cluster " + std::to_string(c) + " has no weight");
        sp.points.push_back({idx, c, it->second});
    }
    if (weight_of.size() != index_of.size()) throw ValidationError("simpoints and weights list different clusters");
    return sp;
}

std::string format_cluster_json(const Clustering& c, const SimPointSet& sp) {
    std::string out = "{\n  \"k\": " + std::to_string(c.k) + ",\n  \"seed\": " + std::to_string(c.seed) +
                      ",\n  \"inertia\": " + format_real(c.inertia) + ",\n  \"assignments\": [";
    for (std::size_t i = 0; i < c.assignments.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(c.assignments[i]);
    }
    out += "],\n  \"centroids\": [";
    for (std::size_t r = 0; r < c.centroids.rows(); ++r) {
        out += r ? ",\n    [" : "\n    [";
        const auto row = c.centroids.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_real(row[j]);
        }
        out += ']';
    }
    out += "\n  ],\n  \"simpoints\": [";
    for (std::size_t i = 0; i < sp.points.size(); ++i) {
        const auto& p = sp.points[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"window_index\": " + std::to_string(p.window_index) + ", \"cluster_id\": " +
               std::to_string(p.cluster_id) + ", \"weight\": " + format_real(p.weight) + "}";
    }
    out += "\n  ]\n}\n";
    return out;
}

void parse_cluster_json(const std::string& text, Clustering& c, SimPointSet& sp) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        c = Clustering{};
        c.k = j.at("k").get<std::uint32_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.inertia = j.at("inertia").get<double>();
        c.assignments = j.at("assignments").get<std::vector<std::uint32_t>>();
        const auto& cents = j.at("centroids");
        const std::size_t dim = cents.empty() ? 0 : cents[0].size();
        c.centroids = Matrix(cents.size(), dim);
        for (std::size_t r = 0; r < cents.size(); ++r) {
            if (cents[r].size() != dim) throw ValidationError("cluster bundle: ragged centroid rows");
            for (std::size_t k = 0; k < dim; ++k) c.centroids(r, k) = cents[r][k].get<double>();
        }
        sp = SimPointSet{};
        for (const auto& p : j.at("simpoints")) {
            sp.points.push_back({p.at("window_index").get<std::size_t>(), p.at("cluster_id").get<std::uint32_t>(),
                                 p.at("weight").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed cluster bundle: ") + e.what());
    }
    for (auto a : c.assignments) {
        if (a >= c.k) throw ValidationError("cluster bundle: assignment out of range");
    }
}

}  // namespace mavpoint
