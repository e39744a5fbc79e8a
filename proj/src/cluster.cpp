#include "mavpoint/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mavpoint/error.hpp"
#include "mavpoint/kernels.hpp"
#include "mavpoint/rng.hpp"

namespace mavpoint {

namespace {

void check_k(std::size_t k, std::size_t n) {
    if (k == 0) throw ValidationError("k must be positive");
    if (k > n) {
        throw ValidationError("k exceeds window count (k=" + std::to_string(k) + ", windows=" + std::to_string(n) +
                              ")");
    }
}

void check_clusterable(const FeatureMatrix& m) {
    switch (m.stage) {
        case Stage::combined:
        case Stage::bbv_projected:
        case Stage::mav_projected:
        case Stage::mav_weighted:
            return;
        default:
            throw ValidationError(std::string("kmeans: expected a combined or projected matrix, got stage ") +
                                  to_string(m.stage));
    }
}

Matrix kmeanspp_init(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    Matrix centroids(k, points.cols());
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);

    auto take = [&](std::size_t idx, std::size_t slot) {
        chosen[idx] = 1;
        std::copy(points.row(idx).begin(), points.row(idx).end(), centroids.row(slot).begin());
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], squared_euclidean(points.row(i), points.row(idx)));
        }
    };

    take(rng.below(n), 0);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : nearest) total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += nearest[i];
                if (nearest[i] > 0.0 && acc > target) {
                    pick = i;
                    break;
                }
            }
            // Rounding can leave target just past the final sum.
            if (pick == n) {
                for (std::size_t i = n; i-- > 0;) {
                    if (nearest[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // Every point coincides with a centre: fall back to a uniform pick
            // among the points not yet used.
            std::size_t remaining = 0;
            for (char ch : chosen) remaining += ch == 0;
            std::size_t r = rng.below(remaining);
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) continue;
                if (r-- == 0) {
                    pick = i;
                    break;
                }
            }
        }
        take(pick, c);
    }
    return centroids;
}

void update_centroids(const Matrix& points, const std::vector<std::uint32_t>& assign, Matrix& centroids) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> counts(k, 0);
    Matrix sums(k, points.cols());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto dst = sums.row(assign[i]);
        const auto src = points.row(i);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        auto dst = centroids.row(c);
        const auto src = sums.row(c);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] / static_cast<double>(counts[c]);
    }
}

// Reseeds each empty cluster with the point farthest from its centroid
// (lowest index on ties) taken from a cluster that can spare it.
bool repair_empty(const Matrix& points, kernels::Assignment& state, Matrix& centroids) {
    const std::size_t k = centroids.rows();
    std::vector<std::size_t> counts(k, 0);
    for (auto c : state.cluster) ++counts[c];
    bool repaired = false;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        std::size_t far = points.rows();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (counts[state.cluster[i]] > 1 && state.dist2[i] > far_d) {
                far_d = state.dist2[i];
                far = i;
            }
        }
        --counts[state.cluster[far]];
        state.cluster[far] = static_cast<std::uint32_t>(c);
        state.dist2[far] = 0.0;
        counts[c] = 1;
        std::copy(points.row(far).begin(), points.row(far).end(), centroids.row(c).begin());
        repaired = true;
    }
    return repaired;
}

double sum_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

Clustering kmeans_single(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options,
                         std::vector<double>* inertia_history) {
    check_k(k, points.rows());
    Rng rng(seed);
    Matrix centroids = kmeanspp_init(points, k, rng);
    kernels::Assignment state;

    bool converged = false;
    double inertia = std::numeric_limits<double>::infinity();
    // After the inertia criterion is met, polishing passes only reassign
    // until every point sits with its nearest centroid.
    const std::size_t budget = 2 * options.max_iterations;
    for (std::size_t it = 0; it < budget; ++it) {
        const std::size_t changed = kernels::omp::assign_nearest(points, centroids, state);
        const bool repaired = repair_empty(points, state, centroids);
        if (it > 0 && changed == 0 && !repaired) break;
        if (converged && !repaired) break;
        if (it + 1 == budget) break;
        update_centroids(points, state.cluster, centroids);

        std::vector<double> d2(points.rows());
        for (std::size_t i = 0; i < points.rows(); ++i) {
            d2[i] = squared_euclidean(points.row(i), centroids.row(state.cluster[i]));
        }
        const double next = sum_of(d2);
        if (inertia_history) inertia_history->push_back(next);
        if (!converged) {
            const bool small_change =
                std::isfinite(inertia) && (inertia == 0.0 || std::abs(inertia - next) < options.tolerance * inertia);
            if (small_change || it + 1 >= options.max_iterations) converged = true;
        }
        inertia = next;
    }

    Clustering out;
    out.assignments = std::move(state.cluster);
    out.centroids = std::move(centroids);
    out.inertia = sum_of(state.dist2);
    out.k = static_cast<std::uint32_t>(k);
    out.seed = seed;
    return out;
}

Clustering kmeans(const FeatureMatrix& m, std::size_t k, std::uint64_t seed, std::size_t restarts,
                  const KMeansOptions& options) {
    check_clusterable(m);
    check_k(k, m.n_windows());
    if (restarts == 0) throw ValidationError("restarts must be positive");
    Clustering best;
    for (std::size_t r = 0; r < restarts; ++r) {
        Clustering c = kmeans_single(m.rows, k, derive_seed(seed, r), options);
        if (r == 0 || c.inertia < best.inertia) best = std::move(c);
    }
    best.seed = seed;
    return best;
}

SimPointSet select_simpoints(const Clustering& c, const FeatureMatrix& m) {
    if (c.assignments.size() != m.n_windows()) {
        throw ValidationError("select_simpoints: clustering does not match matrix row count");
    }
    const std::size_t n = m.n_windows();
    std::vector<std::size_t> rep(c.k, n);
    std::vector<double> rep_d(c.k, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> counts(c.k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cid = c.assignments[i];
        ++counts[cid];
        const double d = squared_euclidean(m.rows.row(i), c.centroids.row(cid));
        if (d < rep_d[cid]) {
            rep_d[cid] = d;
            rep[cid] = i;
        }
    }
    SimPointSet out;
    for (std::uint32_t cid = 0; cid < c.k; ++cid) {
        if (counts[cid] == 0) continue;
        out.points.push_back({rep[cid], cid, static_cast<double>(counts[cid]) / static_cast<double>(n)});
    }
    return out;
}

double bic_score(const Matrix& points, const Clustering& c) {
    const auto r = static_cast<double>(points.rows());
    const auto dims = static_cast<double>(points.cols());
    const auto k = static_cast<double>(c.k);
    std::vector<std::size_t> counts(c.k, 0);
    for (auto a : c.assignments) ++counts[a];

    // Floor keeps zero-distortion clusterings finite.
    const double dof = std::max(1.0, r - k);
    const double variance = std::max(c.inertia / (dims * dof), 1e-300);

    double loglik = 0.0;
    for (std::size_t n : counts) {
        if (n == 0) continue;
        const auto rn = static_cast<double>(n);
        loglik += rn * std::log(rn / r);
    }
    loglik -= r * dims / 2.0 * std::log(2.0 * std::numbers::pi * variance);
    loglik -= dims * dof / 2.0;
    const double params = (k - 1.0) + dims * k + 1.0;
    return loglik - params / 2.0 * std::log(r);
}

ChooseKResult choose_k_scored(const FeatureMatrix& m, std::size_t k_max, std::uint64_t seed, double threshold,
                              std::size_t restarts) {
    check_k(k_max, m.n_windows());
    ChooseKResult out;
    for (std::size_t k = 1; k <= k_max; ++k) {
        out.bic.push_back(bic_score(m.rows, kmeans(m, k, seed, restarts)));
    }
    const auto [lo, hi] = std::minmax_element(out.bic.begin(), out.bic.end());
    const double cut = *lo + threshold * (*hi - *lo);
    out.k = 1;
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (out.bic[k - 1] >= cut) {
            out.k = k;
            break;
        }
    }
    return out;
}

std::size_t choose_k(const FeatureMatrix& m, std::size_t k_max, std::uint64_t seed, double threshold,
                     std::size_t restarts) {
    return choose_k_scored(m, k_max, seed, threshold, restarts).k;
}

}  // namespace mavpoint
