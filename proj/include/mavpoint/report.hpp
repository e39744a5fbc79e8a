#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mavpoint/cluster.hpp"
#include "mavpoint/features.hpp"
#include "mavpoint/trace.hpp"

namespace mavpoint {

struct RecurrenceGrid {
    Matrix values;  // M x M block-averaged pairwise distances
    Stage source_stage = Stage::combined;
    std::size_t n_windows = 0;
    Metric metric = Metric::euclidean;
};

// Block boundaries floor(i * n / m) for i = 0..m.
std::vector<std::size_t> block_bounds(std::size_t n, std::size_t m);

RecurrenceGrid recurrence(const FeatureMatrix& m, Metric metric, std::size_t max_dim);

// Binary PGM (P5, maxval 255); pixel = round(255 * value / max), so similar
// windows render dark. An all-zero grid is all black.
std::string format_pgm(const RecurrenceGrid& grid);
void emit_pgm(const RecurrenceGrid& grid, const std::filesystem::path& path);

std::string format_grid_csv(const RecurrenceGrid& grid);

struct ClusterProjection {
    std::uint32_t cluster_id = 0;
    std::size_t representative_index = 0;
    double weight = 0.0;
    double representative_metric = 0.0;
};

struct ProjectionReport {
    double true_metric = 0.0;
    double estimated_metric = 0.0;
    double accuracy = 0.0;  // estimated / true
    std::vector<ClusterProjection> per_cluster;
};

// Compares the simpoint-weighted IPC against the instruction-weighted mean
// IPC of the whole trace.
ProjectionReport evaluate_projection(const WindowSeries& series, const SimPointSet& sp);

std::string format_report_json(const ProjectionReport& report);

// Columns: window_index,cluster_id,is_representative,truth_ipc
std::string format_timeline_csv(const WindowSeries& series, const Clustering& c, const SimPointSet& sp);

double adjusted_rand_index(const std::vector<std::string>& truth, const std::vector<std::uint32_t>& predicted);

// Per-window ground-truth phase labels; throws if any window lacks one.
std::vector<std::string> phase_labels(const WindowSeries& series);

// ARI between the ground-truth phase labels and the cluster assignments.
double phase_alignment(const WindowSeries& series, const Clustering& c);

}  // namespace mavpoint
