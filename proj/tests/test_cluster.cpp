#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "mavpoint/cluster.hpp"
#include "mavpoint/error.hpp"
#include "mavpoint/features.hpp"
#include "mavpoint/rng.hpp"
#include "test_support.hpp"

using namespace mavpoint;

namespace {

// Gaussian blobs of `per` points each, centred on multiples of `spread`.
FeatureMatrix blobs(std::size_t count, std::size_t per, std::size_t dims, double spread, std::uint64_t seed) {
    Rng rng(seed);
    FeatureMatrix m{Matrix(count * per, dims), Stage::combined};
    for (std::size_t b = 0; b < count; ++b) {
        for (std::size_t i = 0; i < per; ++i) {
            for (std::size_t d = 0; d < dims; ++d) {
                m.rows(b * per + i, d) = rng.normal() + (d == b % dims ? spread * static_cast<double>(b + 1) : 0.0);
            }
        }
    }
    return m;
}

double sq(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

Matrix means_of(const Matrix& pts, const std::vector<std::uint32_t>& labels, std::size_t k) {
    Matrix c(k, pts.cols());
    std::vector<double> n(k, 0.0);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        n[labels[i]] += 1.0;
        for (std::size_t d = 0; d < pts.cols(); ++d) c(labels[i], d) += pts(i, d);
    }
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t d = 0; d < pts.cols(); ++d) c(j, d) /= n[j];
    }
    return c;
}

// Independent transcription of the x-means BIC with per-dimension variance.
double oracle_bic(const Matrix& pts, const std::vector<std::uint32_t>& labels, std::size_t k) {
    const Matrix c = means_of(pts, labels, k);
    double sse = 0.0;
    std::vector<double> n(k, 0.0);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        sse += sq(pts.row(i), c.row(labels[i]));
        n[labels[i]] += 1.0;
    }
    const double R = static_cast<double>(pts.rows());
    const double D = static_cast<double>(pts.cols());
    const double K = static_cast<double>(k);
    const double var = sse / (D * (R - K));
    double ll = 0.0;
    for (double ni : n) ll += ni * std::log(ni / R);
    ll += -R * D / 2.0 * std::log(2.0 * std::numbers::pi * var) - D * (R - K) / 2.0;
    return ll - ((K - 1.0) + D * K + 1.0) / 2.0 * std::log(R);
}

}  // namespace

TEST_SUITE("kmeans") {
    TEST_CASE("k = N gives zero inertia") {
        const auto m = blobs(1, 25, 4, 0.0, 3);
        const auto c = kmeans(m, 25, 7);
        CHECK(c.inertia == 0.0);
        std::set<std::uint32_t> used(c.assignments.begin(), c.assignments.end());
        CHECK(used.size() == 25);
    }
    TEST_CASE("k = 1 centroid is the column mean") {
        const auto m = blobs(2, 30, 5, 3.0, 4);
        const auto c = kmeans(m, 1, 7);
        const Matrix expect = means_of(m.rows, std::vector<std::uint32_t>(60, 0), 1);
        for (std::size_t d = 0; d < 5; ++d) CHECK(c.centroids(0, d) == doctest::Approx(expect(0, d)).epsilon(1e-12));
        double sse = 0.0;
        for (std::size_t i = 0; i < 60; ++i) sse += sq(m.rows.row(i), expect.row(0));
        CHECK(c.inertia == doctest::Approx(sse).epsilon(1e-10));
    }
    TEST_CASE("well separated blobs are recovered exactly") {
        const auto m = blobs(2, 50, 3, 100.0, 5);
        const auto c = kmeans(m, 2, 1);
        for (std::size_t i = 0; i < 100; ++i) CHECK(c.assignments[i] == c.assignments[(i / 50) * 50]);
        CHECK(c.assignments[0] != c.assignments[50]);
    }
    TEST_CASE("deterministic for a seed") {
        const auto m = blobs(4, 40, 6, 2.0, 6);
        CHECK(kmeans(m, 4, 11) == kmeans(m, 4, 11));
    }
    TEST_CASE("property: Lloyd inertia is non-increasing") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto m = blobs(5, 30, 4, 1.5, seed);
            std::vector<double> history;
            kmeans_single(m.rows, 6, seed, {}, &history);
            REQUIRE(!history.empty());
            for (std::size_t i = 1; i < history.size(); ++i) CHECK(history[i] <= history[i - 1] * (1.0 + 1e-12));
        }
    }
    TEST_CASE("property: converged points sit with their nearest centroid, no empty cluster") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto m = blobs(4, 25, 3, 1.0, seed + 20);
            const std::size_t k = 3 + seed % 5;
            const auto c = kmeans(m, k, seed);
            std::vector<std::size_t> sizes(k, 0);
            double sse = 0.0;
            for (std::size_t i = 0; i < m.n_windows(); ++i) {
                ++sizes[c.assignments[i]];
                const double own = sq(m.rows.row(i), c.centroids.row(c.assignments[i]));
                sse += own;
                for (std::size_t j = 0; j < k; ++j) CHECK(own <= sq(m.rows.row(i), c.centroids.row(j)) + 1e-9);
            }
            for (auto s : sizes) CHECK(s > 0);
            CHECK(c.inertia == doctest::Approx(sse).epsilon(1e-9));
            const Matrix mean = means_of(m.rows, c.assignments, k);
            for (std::size_t i = 0; i < mean.data().size(); ++i) {
                CHECK(c.centroids.data()[i] == doctest::Approx(mean.data()[i]).epsilon(1e-9));
            }
        }
    }
    TEST_CASE("duplicate points do not leave clusters empty") {
        FeatureMatrix m{Matrix(10, 2), Stage::combined};
        for (std::size_t i = 5; i < 10; ++i) m.rows(i, 0) = 1.0;
        const auto c = kmeans(m, 4, 2);
        std::set<std::uint32_t> used(c.assignments.begin(), c.assignments.end());
        CHECK(used.size() == 4);
        CHECK(c.inertia == 0.0);
    }
    TEST_CASE("input validation") {
        const auto m = blobs(1, 5, 2, 0.0, 1);
        CHECK_THROWS_WITH_AS(kmeans(m, 6, 1), doctest::Contains("k exceeds window count"), ValidationError);
        CHECK_THROWS_AS(kmeans(m, 0, 1), ValidationError);
        CHECK_THROWS_AS(kmeans(FeatureMatrix{m.rows, Stage::mav_decayed}, 2, 1), ValidationError);
        CHECK_NOTHROW(kmeans(FeatureMatrix{m.rows, Stage::bbv_projected}, 2, 1));
    }
    TEST_CASE("zero MAV half clusters like BBV alone") {
        WindowSeries s = test::random_series(12, 80, 0);
        for (auto& w : s.windows) w.mem_op_count = 0;
        recompute_totals(s);
        PipelineConfig cfg;
        cfg.projection_seed = 99;
        const auto b = run_pipeline(s, cfg, PipelineMode::bbv).output;
        const auto c = run_pipeline(s, cfg, PipelineMode::combined).output;
        const auto cb = kmeans(b, 6, 3);
        const auto cc = kmeans(c, 6, 3);
        CHECK(cb.assignments == cc.assignments);
        CHECK(cb.inertia == cc.inertia);
        CHECK(select_simpoints(cb, b) == select_simpoints(cc, c));
    }
}

TEST_SUITE("select_simpoints") {
    TEST_CASE("weights follow cluster sizes") {
        FeatureMatrix m{Matrix(10, 1), Stage::combined};
        Clustering c;
        c.k = 3;
        c.assignments = {0, 0, 0, 0, 0, 1, 1, 1, 2, 2};
        for (std::size_t i = 0; i < 10; ++i) m.rows(i, 0) = static_cast<double>(c.assignments[i]) * 10.0 + 0.1 * i;
        c.centroids = means_of(m.rows, c.assignments, 3);
        const auto sp = select_simpoints(c, m);
        REQUIRE(sp.points.size() == 3);
        CHECK(sp.points[0].weight == 0.5);
        CHECK(sp.points[1].weight == 0.3);
        CHECK(sp.points[2].weight == 0.2);
        CHECK(sp.points[0].window_index == 2);
        CHECK(sp.points[1].window_index == 6);
    }
    TEST_CASE("equidistant members pick the lower index") {
        FeatureMatrix m{Matrix(4, 1), Stage::combined};
        m.rows(0, 0) = 1.0;
        m.rows(1, 0) = -1.0;
        m.rows(2, 0) = -1.0;
        m.rows(3, 0) = 1.0;
        Clustering c;
        c.k = 1;
        c.assignments = {0, 0, 0, 0};
        c.centroids = Matrix(1, 1);
        const auto sp = select_simpoints(c, m);
        CHECK(sp.points[0].window_index == 0);
        CHECK(sp.points[0].weight == 1.0);
    }
    TEST_CASE("property: weights sum to one and representatives belong to their cluster") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto m = blobs(3, 20 + seed, 4, 1.0, seed);
            const auto c = kmeans(m, 5, seed);
            const auto sp = select_simpoints(c, m);
            double total = 0.0;
            for (const auto& p : sp.points) {
                total += p.weight;
                CHECK(c.assignments[p.window_index] == p.cluster_id);
            }
            CHECK(std::abs(total - 1.0) <= 1e-12);
        }
    }
    TEST_CASE("mismatched matrix rejected") {
        const auto m = blobs(1, 6, 2, 0.0, 1);
        const auto c = kmeans(m, 2, 1);
        CHECK_THROWS_AS(select_simpoints(c, blobs(1, 5, 2, 0.0, 1)), ValidationError);
    }
}

TEST_SUITE("choose_k") {
    TEST_CASE("bic matches an independent formula") {
        const auto m = blobs(3, 40, 4, 6.0, 8);
        for (std::size_t k = 1; k <= 5; ++k) {
            const auto c = kmeans(m, k, 3);
            CHECK(bic_score(m.rows, c) == doctest::Approx(oracle_bic(m.rows, c.assignments, k)).epsilon(1e-9));
        }
    }
    TEST_CASE("one blob picks k = 1") { CHECK(choose_k(blobs(1, 120, 4, 0.0, 9), 8, 4) == 1); }
    TEST_CASE("three separated blobs pick k = 3") {
        for (std::uint64_t seed = 0; seed < 3; ++seed) CHECK(choose_k(blobs(3, 60, 4, 12.0, seed), 8, seed) == 3);
    }
    TEST_CASE("k_max = 1") {
        const auto r = choose_k_scored(blobs(3, 10, 2, 5.0, 1), 1, 1);
        CHECK(r.k == 1);
        CHECK(r.bic.size() == 1);
    }
}
