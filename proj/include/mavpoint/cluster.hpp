#pragma once

#include <cstdint>
#include <vector>

#include "mavpoint/features.hpp"
#include "mavpoint/matrix.hpp"

namespace mavpoint {

struct Clustering {
    std::vector<std::uint32_t> assignments;
    Matrix centroids;  // k x D
    double inertia = 0.0;
    std::uint32_t k = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const Clustering&, const Clustering&) = default;
};

struct KMeansOptions {
    std::size_t max_iterations = 100;
    double tolerance = 1e-6;  // relative inertia change
};

// k-means++ seeded Lloyd iterations, best of `restarts` by (inertia, ordinal).
// Accepts the combined matrix or any projected stage.
Clustering kmeans(const FeatureMatrix& m, std::size_t k, std::uint64_t seed, std::size_t restarts = 5,
                  const KMeansOptions& options = {});

// One restart on a plain matrix. `inertia_history`, when given, receives the
// inertia after every centroid update.
Clustering kmeans_single(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {},
                         std::vector<double>* inertia_history = nullptr);

struct SimPoint {
    std::size_t window_index = 0;
    std::uint32_t cluster_id = 0;
    double weight = 0.0;

    friend bool operator==(const SimPoint&, const SimPoint&) = default;
};

struct SimPointSet {
    std::vector<SimPoint> points;  // ordered by cluster id

    friend bool operator==(const SimPointSet&, const SimPointSet&) = default;
};

// Per cluster, the member closest to the centroid (lowest index on ties),
// weighted by cluster size / N.
SimPointSet select_simpoints(const Clustering& c, const FeatureMatrix& m);

// Spherical-Gaussian BIC of a clustering (x-means form, per-dimension variance).
double bic_score(const Matrix& points, const Clustering& c);

struct ChooseKResult {
    std::size_t k = 1;
    std::vector<double> bic;  // bic[k-1] for k = 1..k_max
};

// Smallest k in 1..k_max whose BIC reaches `threshold` of the way from the
// lowest to the highest BIC seen.
ChooseKResult choose_k_scored(const FeatureMatrix& m, std::size_t k_max, std::uint64_t seed, double threshold = 0.9,
                              std::size_t restarts = 5);
std::size_t choose_k(const FeatureMatrix& m, std::size_t k_max, std::uint64_t seed, double threshold = 0.9,
                     std::size_t restarts = 5);

}  // namespace mavpoint
