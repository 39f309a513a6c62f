#include "doctest.h"

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/linalg.hpp"
#include "dense_reference.hpp"

using namespace cevfb;

namespace {

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return diff / scale;
}

}  // namespace

TEST_CASE("banded solve agrees with dense elimination") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (std::size_t n : {5u, 17u, 64u, 200u}) {
        // compact-like rows with a filled first row
        BandedMatrix a(n, 1, 3);
        ref::Matrix dense(n, std::vector<double>(n, 0.0));
        auto put = [&](std::size_t i, std::size_t j, double v) {
            a.at(i, j) = v;
            dense[i][j] = v;
        };
        put(0, 0, 5.0 / 3.0);
        put(0, 1, 2.0 / 3.0);
        put(0, 2, -1.0 / 3.0);
        for (std::size_t i = 1; i < n; ++i) {
            put(i, i, 10.0 + unit(rng));
            put(i, i - 1, 1.0 + 0.3 * unit(rng));
            if (i + 1 < n) put(i, i + 1, 1.0 + 0.3 * unit(rng));
        }
        std::vector<double> rhs(n);
        for (auto& v : rhs) v = unit(rng);

        std::vector<double> x(rhs);
        BandedLu(a).solve_in_place(x);
        CHECK(max_rel_diff(x, ref::gauss(dense, rhs)) <= 1e-12);

        std::vector<double> back(n);
        a.multiply(x, back);
        double res = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res = std::max(res, std::abs(back[i] - rhs[i]));
            norm = std::max(norm, std::abs(rhs[i]));
        }
        CHECK(res <= 1e-12 * norm);
    }
}

TEST_CASE("identity band solve returns the rhs") {
    BandedMatrix a(6, 1, 1);
    for (std::size_t i = 0; i < 6; ++i) a.at(i, i) = 1.0;
    std::vector<double> rhs{1, -2, 3, -4, 5, -6};
    auto x = rhs;
    BandedLu(a).solve_in_place(x);
    CHECK(x == rhs);
}

TEST_CASE("singular systems are reported") {
    BandedMatrix a(3, 1, 1);
    a.at(0, 0) = 0.0;
    CHECK_THROWS_AS(BandedLu{a}, Error);

    DenseMatrix d(2, 2);
    d(0, 0) = 1.0;
    d(0, 1) = 2.0;
    d(1, 0) = 2.0;
    d(1, 1) = 4.0;
    CHECK_THROWS_AS(solve_dense(d, {1.0, 2.0}), Error);
}

TEST_CASE("dense solve with pivoting") {
    DenseMatrix d(3, 3);
    const double m[3][3] = {{0, 2, 1}, {1, 1, 1}, {2, 1, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) d(i, j) = m[i][j];
    const auto x = solve_dense(d, {7, 6, 4});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));
}
