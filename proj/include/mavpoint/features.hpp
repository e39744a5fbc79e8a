#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mavpoint/kernels.hpp"
#include "mavpoint/matrix.hpp"
#include "mavpoint/trace.hpp"

namespace mavpoint {

enum class Stage {
    bbv_raw,
    bbv_normalized,
    bbv_projected,
    mav_transformed,
    mav_normalized,
    mav_decayed,
    mav_projected,
    mav_weighted,
    combined,
};

const char* to_string(Stage stage);
Stage stage_from_string(const std::string& name);

// An N x D feature matrix tagged with the pipeline stage that produced it.
struct FeatureMatrix {
    Matrix rows;
    Stage stage = Stage::bbv_raw;

    std::size_t n_windows() const { return rows.rows(); }
    std::size_t dim() const { return rows.cols(); }

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

struct PipelineConfig {
    double decay_lambda = 0.95;
    std::uint64_t decay_horizon = 10;
    std::uint64_t projected_dim = 15;
    std::uint64_t projection_seed = 0;
    Metric distance_metric = Metric::euclidean;
    std::optional<std::uint64_t> mav_length_cap;  // nullopt = unlimited

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

void validate(const PipelineConfig& cfg);

// --- BBV side ---------------------------------------------------------------

// Dense block-count rows; columns are the union of block ids in sorted order.
FeatureMatrix bbv_matrix(const WindowSeries& series);

// Divides each row by its L1 norm; zero rows pass through.
FeatureMatrix normalize_bbv_rows(const FeatureMatrix& m);

// --- MAV side ---------------------------------------------------------------

// Inverse access counts sorted in descending order; region ids are dropped.
std::vector<double> transform_mav(const WindowRecord& record);

// Right-pads with zeros (or truncates, keeping the leading entries) to
// D = min(cap, longest vector), with a floor of D = 1.
FeatureMatrix pad_to_matrix(const std::vector<std::vector<double>>& vectors,
                            std::optional<std::uint64_t> cap = std::nullopt);

// Divides every row by the mean row L2 norm, so relative intensity between
// windows survives. An all-zero matrix is returned unchanged.
FeatureMatrix normalize_mav_matrix(const FeatureMatrix& m);

// Row i becomes the lambda^k weighted mean of rows i-k for k = 0..min(i, H).
FeatureMatrix apply_decay(const FeatureMatrix& m, const PipelineConfig& cfg);

// --- shared tail ------------------------------------------------------------

// D x projected_dim matrix of N(0, 1/projected_dim) entries for one stream.
Matrix projection_matrix(std::size_t input_dim, std::size_t projected_dim, std::uint64_t seed,
                         const std::string& stream_label);

// Gaussian random projection. BBV and MAV inputs draw from independent
// streams ("bbv" / "mav") of the same projection_seed.
FeatureMatrix gaussian_project(const FeatureMatrix& m, const PipelineConfig& cfg);

// Fraction of memory operations over the whole run.
double mem_fraction(const WindowSeries& series);

FeatureMatrix adaptive_weight(const FeatureMatrix& m, double fraction);

// Row-wise concatenation, BBV columns first.
FeatureMatrix combine(const FeatureMatrix& bbv, const FeatureMatrix& mav);

// --- end to end -------------------------------------------------------------

enum class PipelineMode { bbv, mav, combined };

const char* to_string(PipelineMode mode);
PipelineMode mode_from_string(const std::string& name);

struct PipelineResult {
    std::vector<FeatureMatrix> stages;  // every intermediate, in pipeline order
    FeatureMatrix output;
    double mem_fraction = 0.0;

    const FeatureMatrix* find(Stage stage) const;
};

PipelineResult run_pipeline(const WindowSeries& series, const PipelineConfig& cfg, PipelineMode mode);

}  // namespace mavpoint
