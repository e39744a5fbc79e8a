#include <cmath>
#include <limits>
#include <string>

#include "mavpoint/error.hpp"
#include "mavpoint/kernels.hpp"

namespace mavpoint {

const char* to_string(Metric metric) { return metric == Metric::euclidean ? "euclidean" : "manhattan"; }

Metric metric_from_string(const std::string& name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "manhattan") return Metric::manhattan;
    throw ValidationError("unknown distance metric \"" + name + "\" (expected euclidean or manhattan)");
}

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
    if (metric == Metric::euclidean) return std::sqrt(squared_euclidean(a, b));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

namespace kernels::serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    }
    return out;
}

Matrix block_mean_distances(const Matrix& m, std::span<const std::size_t> bounds, Metric metric) {
    const std::size_t blocks = bounds.size() - 1;
    Matrix sums(blocks, blocks);
    for (std::size_t bi = 0; bi < blocks; ++bi) {
        for (std::size_t bj = 0; bj < blocks; ++bj) {
            double s = 0.0;
            for (std::size_t i = bounds[bi]; i < bounds[bi + 1]; ++i) {
                for (std::size_t j = bounds[bj]; j < bounds[bj + 1]; ++j) {
                    s += distance(m.row(i), m.row(j), metric);
                }
            }
            const auto cells = static_cast<double>((bounds[bi + 1] - bounds[bi]) * (bounds[bj + 1] - bounds[bj]));
            sums(bi, bj) = s / cells;
        }
    }
    return sums;
}

std::size_t assign_nearest(const Matrix& points, const Matrix& centroids, Assignment& state) {
    const std::size_t n = points.rows();
    state.cluster.resize(n, std::numeric_limits<std::uint32_t>::max());
    state.dist2.resize(n);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double d = squared_euclidean(points.row(i), centroids.row(c));
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::uint32_t>(c);
            }
        }
        const std::uint32_t current = state.cluster[i];
        if (current < centroids.rows() && current != best &&
            squared_euclidean(points.row(i), centroids.row(current)) == best_d) {
            best = current;
        }
        if (best != current) ++changed;
        state.cluster[i] = best;
        state.dist2[i] = best_d;
    }
    return changed;
}

}  // namespace kernels::serial

}  // namespace mavpoint
