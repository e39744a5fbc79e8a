#include <omp.h>

#include <limits>

#include "mavpoint/error.hpp"
#include "mavpoint/kernels.hpp"

namespace mavpoint {

void set_thread_count(int threads) {
    omp_set_num_threads(threads > 0 ? threads : omp_get_num_procs());
}

namespace kernels::omp {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        auto dst = out.row(static_cast<std::size_t>(i));
        const auto src = a.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < src.size(); ++k) {
            const double v = src[k];
            if (v == 0.0) continue;
            const auto brow = b.row(k);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * brow[j];
        }
    }
    return out;
}

Matrix block_mean_distances(const Matrix& m, std::span<const std::size_t> bounds, Metric metric) {
    const auto blocks = static_cast<std::ptrdiff_t>(bounds.size() - 1);
    Matrix out(bounds.size() - 1, bounds.size() - 1);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t bi = 0; bi < blocks; ++bi) {
        const std::size_t i0 = bounds[bi];
        const std::size_t i1 = bounds[bi + 1];
        for (std::ptrdiff_t bj = bi; bj < blocks; ++bj) {
            const std::size_t j0 = bounds[bj];
            const std::size_t j1 = bounds[bj + 1];
            double s = 0.0;
            if (bi == bj) {
                for (std::size_t i = i0; i < i1; ++i) {
                    for (std::size_t j = i + 1; j < i1; ++j) s += distance(m.row(i), m.row(j), metric);
                }
                s *= 2.0;
            } else {
                for (std::size_t i = i0; i < i1; ++i) {
                    for (std::size_t j = j0; j < j1; ++j) s += distance(m.row(i), m.row(j), metric);
                }
            }
            const double mean = s / static_cast<double>((i1 - i0) * (j1 - j0));
            out(bi, bj) = mean;
            out(bj, bi) = mean;
        }
    }
    return out;
}

std::size_t assign_nearest(const Matrix& points, const Matrix& centroids, Assignment& state) {
    const auto n = static_cast<std::ptrdiff_t>(points.rows());
    state.cluster.resize(points.rows(), std::numeric_limits<std::uint32_t>::max());
    state.dist2.resize(points.rows());
    std::size_t changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto p = points.row(static_cast<std::size_t>(i));
        std::uint32_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double d = squared_euclidean(p, centroids.row(c));
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::uint32_t>(c);
            }
        }
        const std::uint32_t current = state.cluster[i];
        if (current < centroids.rows() && current != best && squared_euclidean(p, centroids.row(current)) == best_d) {
            best = current;
        }
        if (best != current) ++changed;
        state.cluster[i] = best;
        state.dist2[i] = best_d;
    }
    return changed;
}

}  // namespace kernels::omp

}  // namespace mavpoint
