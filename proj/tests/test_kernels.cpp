#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mavpoint/error.hpp"
#include "mavpoint/kernels.hpp"
#include "mavpoint/rng.hpp"

using namespace mavpoint;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double zero_prob = 0.0) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform() < zero_prob ? 0.0 : rng.normal();
    return m;
}

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
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

double naive_distance(const Matrix& m, std::size_t i, std::size_t j, Metric metric) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        const double d = m(i, c) - m(j, c);
        s += metric == Metric::euclidean ? d * d : std::abs(d);
    }
    return metric == Metric::euclidean ? std::sqrt(s) : s;
}

std::vector<std::size_t> even_bounds(std::size_t n, std::size_t m) {
    std::vector<std::size_t> b(m + 1);
    for (std::size_t i = 0; i <= m; ++i) b[i] = i * n / m;
    return b;
}

}  // namespace

TEST_CASE("matmul matches the naive triple loop") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix a = random_matrix(37, 53, seed, 0.5);
        const Matrix b = random_matrix(53, 15, seed + 10);
        const Matrix ref = naive_matmul(a, b);
        const Matrix s = kernels::serial::matmul(a, b);
        const Matrix o = kernels::omp::matmul(a, b);
        CHECK(s == o);
        for (std::size_t i = 0; i < ref.data().size(); ++i) {
            CHECK(s.data()[i] == doctest::Approx(ref.data()[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("matmul shape mismatch is rejected") {
    CHECK_THROWS_AS(kernels::serial::matmul(Matrix(2, 3), Matrix(4, 2)), ValidationError);
    CHECK_THROWS_AS(kernels::omp::matmul(Matrix(2, 3), Matrix(4, 2)), ValidationError);
}

TEST_CASE("block_mean_distances matches a brute-force pairwise mean") {
    for (Metric metric : {Metric::euclidean, Metric::manhattan}) {
        const Matrix m = random_matrix(23, 6, 3);
        const auto bounds = even_bounds(23, 5);
        const Matrix s = kernels::serial::block_mean_distances(m, bounds, metric);
        const Matrix o = kernels::omp::block_mean_distances(m, bounds, metric);
        for (std::size_t bi = 0; bi < 5; ++bi) {
            for (std::size_t bj = 0; bj < 5; ++bj) {
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t i = bounds[bi]; i < bounds[bi + 1]; ++i) {
                    for (std::size_t j = bounds[bj]; j < bounds[bj + 1]; ++j) {
                        sum += naive_distance(m, i, j, metric);
                        ++count;
                    }
                }
                const double expect = sum / static_cast<double>(count);
                CHECK(s(bi, bj) == doctest::Approx(expect).epsilon(1e-12));
                CHECK(std::abs(o(bi, bj) - s(bi, bj)) <= 1e-12 * std::max(1.0, std::abs(s(bi, bj))));
                CHECK(s(bi, bj) == doctest::Approx(s(bj, bi)).epsilon(1e-12));
                CHECK(o(bi, bj) == o(bj, bi));
            }
        }
    }
}

TEST_CASE("block_mean_distances with one row per block is the distance matrix") {
    const Matrix m = random_matrix(9, 4, 8);
    const auto bounds = even_bounds(9, 9);
    const Matrix o = kernels::omp::block_mean_distances(m, bounds, Metric::euclidean);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(o(i, i) == 0.0);
        for (std::size_t j = 0; j < 9; ++j) {
            CHECK(o(i, j) == doctest::Approx(naive_distance(m, i, j, Metric::euclidean)).epsilon(1e-12));
        }
    }
}

TEST_CASE("assign_nearest agrees between serial and omp and with brute force") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix pts = random_matrix(400, 30, seed);
        const Matrix cen = random_matrix(12, 30, seed + 50);
        kernels::Assignment a{std::vector<std::uint32_t>(400, 0), {}};
        kernels::Assignment b = a;
        const auto ca = kernels::serial::assign_nearest(pts, cen, a);
        const auto cb = kernels::omp::assign_nearest(pts, cen, b);
        CHECK(ca == cb);
        CHECK(a.cluster == b.cluster);
        CHECK(a.dist2 == b.dist2);
        std::size_t changed = 0;
        for (std::size_t i = 0; i < 400; ++i) {
            std::uint32_t best = 0;
            double best_d = 1e300;
            for (std::uint32_t c = 0; c < 12; ++c) {
                double d = 0.0;
                for (std::size_t j = 0; j < 30; ++j) d += (pts(i, j) - cen(c, j)) * (pts(i, j) - cen(c, j));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            CHECK(a.cluster[i] == best);
            CHECK(a.dist2[i] == doctest::Approx(best_d).epsilon(1e-12));
            changed += best != 0 ? 1 : 0;
        }
        CHECK(ca == changed);
    }
}

TEST_CASE("assign_nearest tie rules") {
    Matrix pts(2, 1);
    pts(0, 0) = 0.0;
    pts(1, 0) = 0.0;
    Matrix cen(3, 1);
    cen(0, 0) = -1.0;
    cen(1, 0) = 1.0;
    cen(2, 0) = 5.0;
    // Point 0 sits in cluster 1, which ties for nearest: it stays.
    // Point 1 sits in cluster 2, which is not nearest: lowest tied id wins.
    kernels::Assignment s{{1, 2}, {}};
    CHECK(kernels::serial::assign_nearest(pts, cen, s) == 1);
    CHECK(s.cluster == std::vector<std::uint32_t>{1, 0});
    kernels::Assignment o{{1, 2}, {}};
    CHECK(kernels::omp::assign_nearest(pts, cen, o) == 1);
    CHECK(o.cluster == s.cluster);
}

TEST_CASE("omp results do not depend on the thread count") {
    const Matrix pts = random_matrix(300, 20, 21);
    const Matrix cen = random_matrix(7, 20, 22);
    const Matrix proj = random_matrix(20, 15, 23);
    const auto bounds = even_bounds(300, 40);

    set_thread_count(1);
    const Matrix mm1 = kernels::omp::matmul(pts, proj);
    const Matrix bd1 = kernels::omp::block_mean_distances(pts, bounds, Metric::euclidean);
    kernels::Assignment a1{std::vector<std::uint32_t>(300, 0), {}};
    kernels::omp::assign_nearest(pts, cen, a1);

    set_thread_count(4);
    const Matrix mm4 = kernels::omp::matmul(pts, proj);
    const Matrix bd4 = kernels::omp::block_mean_distances(pts, bounds, Metric::euclidean);
    kernels::Assignment a4{std::vector<std::uint32_t>(300, 0), {}};
    kernels::omp::assign_nearest(pts, cen, a4);
    set_thread_count(0);

    CHECK(mm1 == mm4);
    CHECK(bd1 == bd4);
    CHECK(a1.cluster == a4.cluster);
    CHECK(a1.dist2 == a4.dist2);
}

TEST_CASE("metric names") {
    CHECK(metric_from_string("manhattan") == Metric::manhattan);
    CHECK(std::string(to_string(Metric::euclidean)) == "euclidean");
    CHECK_THROWS_AS(metric_from_string("cosine"), ValidationError);
}
