#include "mavpoint/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mavpoint/error.hpp"
#include "mavpoint/rng.hpp"

namespace mavpoint {

namespace {

constexpr std::pair<Stage, const char*> kStageNames[] = {
    {Stage::bbv_raw, "bbv_raw"},
    {Stage::bbv_normalized, "bbv_normalized"},
    {Stage::bbv_projected, "bbv_projected"},
    {Stage::mav_transformed, "mav_transformed"},
    {Stage::mav_normalized, "mav_normalized"},
    {Stage::mav_decayed, "mav_decayed"},
    {Stage::mav_projected, "mav_projected"},
    {Stage::mav_weighted, "mav_weighted"},
    {Stage::combined, "combined"},
};

void require_stage(const FeatureMatrix& m, Stage expected, const char* op) {
    if (m.stage != expected) {
        throw ValidationError(std::string(op) + ": expected stage " + to_string(expected) + ", got " +
                              to_string(m.stage));
    }
}

double l2_norm(std::span<const double> row) {
    double s = 0.0;
    for (double v : row) s += v * v;
    return std::sqrt(s);
}

}  // namespace

const char* to_string(Stage stage) {
    for (const auto& [s, name] : kStageNames) {
        if (s == stage) return name;
    }
    return "unknown";
}

Stage stage_from_string(const std::string& name) {
    for (const auto& [s, n] : kStageNames) {
        if (name == n) return s;
    }
    throw ValidationError("unknown stage \"" + name + "\"");
}

const char* to_string(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::bbv: return "bbv";
        case PipelineMode::mav: return "mav";
        case PipelineMode::combined: return "combined";
    }
    return "unknown";
}

PipelineMode mode_from_string(const std::string& name) {
    if (name == "bbv") return PipelineMode::bbv;
    if (name == "mav") return PipelineMode::mav;
    if (name == "combined") return PipelineMode::combined;
    throw ValidationError("unknown mode \"" + name + "\" (expected bbv, mav or combined)");
}

void validate(const PipelineConfig& cfg) {
    if (!(cfg.decay_lambda > 0.0 && cfg.decay_lambda < 1.0)) {
        throw ValidationError("pipeline: decay_lambda must lie in (0,1)");
    }
    if (cfg.projected_dim == 0) throw ValidationError("pipeline: projected_dim must be >= 1");
    if (cfg.mav_length_cap && *cfg.mav_length_cap == 0) {
        throw ValidationError("pipeline: mav_length_cap must be positive");
    }
}

FeatureMatrix bbv_matrix(const WindowSeries& series) {
    std::set<BlockId> blocks;
    for (const auto& w : series.windows) {
        for (const auto& kv : w.bbv) blocks.insert(kv.first);
    }
    const std::vector<BlockId> columns(blocks.begin(), blocks.end());
    FeatureMatrix out{Matrix(series.size(), columns.size()), Stage::bbv_raw};
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (const auto& [block, count] : series.windows[i].bbv) {
            const auto col = std::lower_bound(columns.begin(), columns.end(), block) - columns.begin();
            out.rows(i, static_cast<std::size_t>(col)) = static_cast<double>(count);
        }
    }
    return out;
}

FeatureMatrix normalize_bbv_rows(const FeatureMatrix& m) {
    require_stage(m, Stage::bbv_raw, "normalize_bbv_rows");
    FeatureMatrix out{m.rows, Stage::bbv_normalized};
    const auto n = static_cast<std::ptrdiff_t>(m.n_windows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto row = out.rows.row(static_cast<std::size_t>(i));
        double sum = 0.0;
        for (double v : row) sum += std::abs(v);
        if (sum == 0.0) continue;
        for (double& v : row) v /= sum;
    }
    return out;
}

std::vector<double> transform_mav(const WindowRecord& record) {
    std::vector<std::uint64_t> counts;
    counts.reserve(record.mav.size());
    for (const auto& kv : record.mav) counts.push_back(kv.second);
    // Ascending count is descending inverse frequency.
    std::sort(counts.begin(), counts.end());
    std::vector<double> out(counts.size());
    std::transform(counts.begin(), counts.end(), out.begin(),
                   [](std::uint64_t c) { return 1.0 / static_cast<double>(c); });
    return out;
}

FeatureMatrix pad_to_matrix(const std::vector<std::vector<double>>& vectors, std::optional<std::uint64_t> cap) {
    std::size_t longest = 0;
    for (const auto& v : vectors) longest = std::max(longest, v.size());
    std::size_t dim = std::max<std::size_t>(1, longest);
    if (cap) dim = std::max<std::size_t>(1, std::min<std::size_t>(dim, *cap));
    FeatureMatrix out{Matrix(vectors.size(), dim), Stage::mav_transformed};
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const std::size_t n = std::min(dim, vectors[i].size());
        std::copy_n(vectors[i].begin(), n, out.rows.row(i).begin());
    }
    return out;
}

FeatureMatrix normalize_mav_matrix(const FeatureMatrix& m) {
    require_stage(m, Stage::mav_transformed, "normalize_mav_matrix");
    FeatureMatrix out{m.rows, Stage::mav_normalized};
    const std::size_t n = m.n_windows();
    if (n == 0) return out;
    std::vector<double> norms(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        norms[i] = l2_norm(m.rows.row(static_cast<std::size_t>(i)));
    }
    double total = 0.0;
    for (double v : norms) total += v;
    const double mean = total / static_cast<double>(n);
    if (mean == 0.0) return out;
    for (double& v : out.rows.data()) v /= mean;
    return out;
}

FeatureMatrix apply_decay(const FeatureMatrix& m, const PipelineConfig& cfg) {
    require_stage(m, Stage::mav_normalized, "apply_decay");
    validate(cfg);
    FeatureMatrix out{Matrix(m.n_windows(), m.dim()), Stage::mav_decayed};
    const std::size_t horizon = cfg.decay_horizon;
    std::vector<double> weights(horizon + 1);
    weights[0] = 1.0;
    for (std::size_t k = 1; k <= horizon; ++k) weights[k] = weights[k - 1] * cfg.decay_lambda;

    const auto n = static_cast<std::ptrdiff_t>(m.n_windows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        auto dst = out.rows.row(i);
        const std::size_t reach = std::min(i, horizon);
        double total = 0.0;
        for (std::size_t k = 0; k <= reach; ++k) {
            const auto src = m.rows.row(i - k);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += weights[k] * src[j];
            total += weights[k];
        }
        for (double& v : dst) v /= total;
    }
    return out;
}

Matrix projection_matrix(std::size_t input_dim, std::size_t projected_dim, std::uint64_t seed,
                         const std::string& stream_label) {
    Rng rng(derive_seed(seed, stream_label));
    Matrix p(input_dim, projected_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(projected_dim));
    for (double& v : p.data()) v = rng.normal() * scale;
    return p;
}

FeatureMatrix gaussian_project(const FeatureMatrix& m, const PipelineConfig& cfg) {
    validate(cfg);
    Stage next;
    const char* label;
    if (m.stage == Stage::bbv_normalized) {
        next = Stage::bbv_projected;
        label = "bbv";
    } else if (m.stage == Stage::mav_decayed) {
        next = Stage::mav_projected;
        label = "mav";
    } else {
        throw ValidationError(std::string("gaussian_project: expected stage bbv_normalized or mav_decayed, got ") +
                              to_string(m.stage));
    }
    if (m.dim() == 0) throw ValidationError("gaussian_project: input has zero columns");
    const Matrix p = projection_matrix(m.dim(), cfg.projected_dim, cfg.projection_seed, label);
    return {kernels::omp::matmul(m.rows, p), next};
}

double mem_fraction(const WindowSeries& series) {
    if (series.total_instr == 0) throw ValidationError("mem_fraction: total_instr is zero");
    return static_cast<double>(series.total_mem_ops) / static_cast<double>(series.total_instr);
}

FeatureMatrix adaptive_weight(const FeatureMatrix& m, double fraction) {
    require_stage(m, Stage::mav_projected, "adaptive_weight");
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValidationError("adaptive_weight: fraction outside [0,1]");
    FeatureMatrix out{m.rows, Stage::mav_weighted};
    for (double& v : out.rows.data()) v *= fraction;
    return out;
}

FeatureMatrix combine(const FeatureMatrix& bbv, const FeatureMatrix& mav) {
    require_stage(bbv, Stage::bbv_projected, "combine");
    require_stage(mav, Stage::mav_weighted, "combine");
    if (bbv.n_windows() != mav.n_windows()) {
        throw ValidationError("combine: window counts differ (" + std::to_string(bbv.n_windows()) + " vs " +
                              std::to_string(mav.n_windows()) + ")");
    }
    FeatureMatrix out{Matrix(bbv.n_windows(), bbv.dim() + mav.dim()), Stage::combined};
    for (std::size_t i = 0; i < bbv.n_windows(); ++i) {
        auto dst = out.rows.row(i);
        std::copy(bbv.rows.row(i).begin(), bbv.rows.row(i).end(), dst.begin());
        std::copy(mav.rows.row(i).begin(), mav.rows.row(i).end(), dst.begin() + static_cast<std::ptrdiff_t>(bbv.dim()));
    }
    return out;
}

const FeatureMatrix* PipelineResult::find(Stage stage) const {
    for (const auto& m : stages) {
        if (m.stage == stage) return &m;
    }
    return nullptr;
}

PipelineResult run_pipeline(const WindowSeries& series, const PipelineConfig& cfg, PipelineMode mode) {
    validate(cfg);
    PipelineResult result;
    result.mem_fraction = mem_fraction(series);

    if (mode != PipelineMode::mav) {
        result.stages.push_back(bbv_matrix(series));
        result.stages.push_back(normalize_bbv_rows(result.stages.back()));
        result.stages.push_back(gaussian_project(result.stages.back(), cfg));
    }
    const FeatureMatrix* bbv_projected = mode == PipelineMode::mav ? nullptr : &result.stages.back();
    if (mode == PipelineMode::bbv) {
        result.output = *bbv_projected;
        return result;
    }

    std::vector<std::vector<double>> vectors(series.size());
    const auto n = static_cast<std::ptrdiff_t>(series.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) vectors[i] = transform_mav(series.windows[i]);

    std::vector<FeatureMatrix> mav;
    mav.push_back(pad_to_matrix(vectors, cfg.mav_length_cap));
    mav.push_back(normalize_mav_matrix(mav.back()));
    mav.push_back(apply_decay(mav.back(), cfg));
    mav.push_back(gaussian_project(mav.back(), cfg));
    mav.push_back(adaptive_weight(mav.back(), result.mem_fraction));

    if (mode == PipelineMode::mav) {
        result.output = mav.back();
    } else {
        result.output = combine(*bbv_projected, mav.back());
    }
    for (auto& m : mav) result.stages.push_back(std::move(m));
    if (mode == PipelineMode::combined) result.stages.push_back(result.output);
    return result;
}

}  // namespace mavpoint
