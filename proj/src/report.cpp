#include "mavpoint/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mavpoint/error.hpp"

namespace mavpoint {

std::vector<std::size_t> block_bounds(std::size_t n, std::size_t m) {
    std::vector<std::size_t> bounds(m + 1);
    for (std::size_t i = 0; i <= m; ++i) bounds[i] = i * n / m;
    return bounds;
}

RecurrenceGrid recurrence(const FeatureMatrix& m, Metric metric, std::size_t max_dim) {
    if (m.n_windows() == 0) throw ValidationError("recurrence: matrix has no rows");
    if (max_dim == 0) throw ValidationError("recurrence: max_dim must be positive");
    const std::size_t dim = std::min(m.n_windows(), max_dim);
    const auto bounds = block_bounds(m.n_windows(), dim);
    return {kernels::omp::block_mean_distances(m.rows, bounds, metric), m.stage, m.n_windows(), metric};
}

std::string format_pgm(const RecurrenceGrid& grid) {
    const std::size_t side = grid.values.rows();
    double peak = 0.0;
    for (double v : grid.values.data()) peak = std::max(peak, v);
    std::string out = "P5\n" + std::to_string(side) + " " + std::to_string(side) + "\n255\n";
    for (double v : grid.values.data()) {
        const long px = peak > 0.0 ? std::lround(255.0 * v / peak) : 0;
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(px, 0L, 255L))));
    }
    return out;
}

void emit_pgm(const RecurrenceGrid& grid, const std::filesystem::path& path) {
    write_text_file(path, format_pgm(grid));
}

std::string format_grid_csv(const RecurrenceGrid& grid) {
    std::string out;
    for (std::size_t i = 0; i < grid.values.rows(); ++i) {
        const auto row = grid.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += format_real(row[j]);
        }
        out += '\n';
    }
    return out;
}

ProjectionReport evaluate_projection(const WindowSeries& series, const SimPointSet& sp) {
    ProjectionReport report;
    double weighted = 0.0;
    double instr = 0.0;
    for (const auto& w : series.windows) {
        if (!w.truth_ipc) {
            throw ValidationError("evaluate_projection: window " + std::to_string(w.index) + " has no truth_ipc");
        }
        weighted += static_cast<double>(w.instr_count) * *w.truth_ipc;
        instr += static_cast<double>(w.instr_count);
    }
    if (instr == 0.0) throw ValidationError("evaluate_projection: trace has no instructions");
    report.true_metric = weighted / instr;

    for (const auto& p : sp.points) {
        if (p.window_index >= series.size()) {
            throw ValidationError("evaluate_projection: representative window " + std::to_string(p.window_index) +
                                  " out of range");
        }
        const double metric = *series.windows[p.window_index].truth_ipc;
        report.estimated_metric += p.weight * metric;
        report.per_cluster.push_back({p.cluster_id, p.window_index, p.weight, metric});
    }
    report.accuracy = report.estimated_metric / report.true_metric;
    return report;
}

std::string format_report_json(const ProjectionReport& report) {
    // Reals go through format_real so the file is reproducible to the bit.
    std::string out = "{\n  \"true_metric\": " + format_real(report.true_metric) +
                      ",\n  \"estimated_metric\": " + format_real(report.estimated_metric) +
                      ",\n  \"accuracy\": " + format_real(report.accuracy) + ",\n  \"per_cluster\": [";
    for (std::size_t i = 0; i < report.per_cluster.size(); ++i) {
        const auto& c = report.per_cluster[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"cluster_id\": " + std::to_string(c.cluster_id) +
               ", \"representative_index\": " + std::to_string(c.representative_index) +
               ", \"weight\": " + format_real(c.weight) +
               ", \"representative_metric\": " + format_real(c.representative_metric) + "}";
    }
    out += report.per_cluster.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

std::string format_timeline_csv(const WindowSeries& series, const Clustering& c, const SimPointSet& sp) {
    if (c.assignments.size() != series.size()) {
        throw ValidationError("timeline: clustering does not match trace length");
    }
    std::vector<char> is_rep(series.size(), 0);
    for (const auto& p : sp.points) {
        if (p.window_index < is_rep.size()) is_rep[p.window_index] = 1;
    }
    std::string out = "window_index,cluster_id,is_representative,truth_ipc\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& ipc = series.windows[i].truth_ipc;
        out += std::to_string(i) + ',' + std::to_string(c.assignments[i]) + ',' + (is_rep[i] ? "1" : "0") + ',' +
               (ipc ? format_real(*ipc) : std::string()) + '\n';
    }
    return out;
}

double adjusted_rand_index(const std::vector<std::string>& truth, const std::vector<std::uint32_t>& predicted) {
    if (truth.size() != predicted.size()) throw ValidationError("adjusted_rand_index: label vectors differ in length");
    const std::size_t n = truth.size();
    if (n < 2) return 1.0;
    auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };

    std::map<std::string, std::size_t> truth_ids;
    for (const auto& t : truth) truth_ids.emplace(t, truth_ids.size());
    std::map<std::pair<std::size_t, std::uint32_t>, std::size_t> table;
    std::map<std::size_t, std::size_t> row_sums;
    std::map<std::uint32_t, std::size_t> col_sums;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = truth_ids.at(truth[i]);
        ++table[{t, predicted[i]}];
        ++row_sums[t];
        ++col_sums[predicted[i]];
    }
    double index = 0.0;
    for (const auto& kv : table) index += pairs(static_cast<double>(kv.second));
    double a = 0.0;
    for (const auto& kv : row_sums) a += pairs(static_cast<double>(kv.second));
    double b = 0.0;
    for (const auto& kv : col_sums) b += pairs(static_cast<double>(kv.second));
    const double total = pairs(static_cast<double>(n));
    const double expected = a * b / total;
    const double max_index = (a + b) / 2.0;
    // Both partitions trivial (all singletons or one block each).
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

std::vector<std::string> phase_labels(const WindowSeries& series) {
    std::vector<std::string> labels;
    labels.reserve(series.size());
    for (const auto& w : series.windows) {
        if (!w.phase) {
            throw ValidationError("phase labels unavailable: window " + std::to_string(w.index) +
                                  " has no phase field");
        }
        labels.push_back(*w.phase);
    }
    return labels;
}

double phase_alignment(const WindowSeries& series, const Clustering& c) {
    return adjusted_rand_index(phase_labels(series), c.assignments);
}

}  // namespace mavpoint
