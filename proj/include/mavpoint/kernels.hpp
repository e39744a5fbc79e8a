#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mavpoint/matrix.hpp"

namespace mavpoint {

enum class Metric { euclidean, manhattan };

const char* to_string(Metric metric);
Metric metric_from_string(const std::string& name);

inline double squared_euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(std::span<const double> a, std::span<const double> b, Metric metric);

// Data-parallel kernels. `serial` is the reference implementation kept for
// testing and benchmarking; `omp` is what the library calls. Where the
// per-element summation order is the same in both (matmul, assign_nearest)
// results are bit-identical; block_mean_distances sums in a different order
// and agrees to rounding.
namespace kernels {

struct Assignment {
    std::vector<std::uint32_t> cluster;  // per point
    std::vector<double> dist2;           // squared distance to the assigned centroid
};

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b);

// Mean pairwise distance between every pair of row blocks. `bounds` has
// M+1 entries; block I is rows [bounds[I], bounds[I+1]).
Matrix block_mean_distances(const Matrix& m, std::span<const std::size_t> bounds, Metric metric);

// Nearest centroid per point by squared Euclidean distance. Ties go to the
// point's current cluster when it is among the nearest, else the lowest id.
// Returns the number of points whose cluster changed.
std::size_t assign_nearest(const Matrix& points, const Matrix& centroids, Assignment& state);

}  // namespace serial

namespace omp {

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix block_mean_distances(const Matrix& m, std::span<const std::size_t> bounds, Metric metric);
std::size_t assign_nearest(const Matrix& points, const Matrix& centroids, Assignment& state);

}  // namespace omp

}  // namespace kernels

// Caps OpenMP parallelism for the kernels; 0 restores the runtime default.
void set_thread_count(int threads);

}  // namespace mavpoint
