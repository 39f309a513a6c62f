#include "doctest.h"

#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/freeboundary.hpp"
#include "core/grid.hpp"
#include "core/oracle.hpp"

using namespace cevfb;

namespace {

ScaledModel model(double strike = 9.0, double alpha = -1.0 / 3.0, double rate = 0.05) {
    return scale({strike, 0.5, 0.2, rate, alpha, 10.0, 3.0});
}

double moment(const std::array<double, 5>& w, const std::array<double, 5>& x, int m) {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += w[i] * std::pow(x[i], m);
    return s;
}

// Q(x) = Q'(0) x + Q''(0) x^2 / 2 sampled at the stencil nodes.
SqrtProfile quadratic_profile(const BoundaryStencil& st, const Grid& grid, double q1, double q2) {
    SqrtProfile p;
    for (auto n : st.nodes) {
        const double x = grid.x(n);
        p.q.push_back(q1 * x + 0.5 * q2 * x * x);
    }
    return p;
}

}  // namespace

TEST_CASE("square-root profile") {
    const auto m = model();
    GridSpec spec;
    spec.h = std::log(2.0) / 4.0;
    const Grid grid = build(spec);
    const double sf = 0.9;
    std::vector<double> u(grid.unknowns(), 0.0);
    const std::array<std::size_t, 1> at4{4};
    CHECK(q_profile(u, sf, at4, m, grid).q[0] == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
    CHECK(std::sqrt(0.9) == doctest::Approx(0.948683).epsilon(1e-6));

    // value on the payoff line: radicand zero, and a tiny negative clamps
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = m.scaled_strike - std::exp(grid.x(i)) * sf;
    const std::array<std::size_t, 3> nodes{1, 2, 3};
    for (double q : q_profile(u, sf, nodes, m, grid).q) CHECK(q == doctest::Approx(0.0).epsilon(1e-7));
    u[2] -= 1e-15;
    CHECK(q_profile(u, sf, nodes, m, grid).q[1] >= 0.0);
}

TEST_CASE("boundary slope and curvature of Q") {
    CHECK(q_prime_x0(model(), 0.9) == doctest::Approx(1.0240561).epsilon(1e-6));
    CHECK(q_prime_x0(model(9.0, -1.0 / 3.0, 0.0), 0.9) == 0.0);
    const auto flat = model(9.0, 0.0);
    CHECK(q_prime_x0(flat, 0.3) == doctest::Approx(q_prime_x0(flat, 0.8)).epsilon(1e-15));

    // beta = 0 and xi2(x0) = 0.01
    const double g = 0.02 - 0.05 + 0.01;
    CHECK(q_second_x0(flat, 0.7, g) == doctest::Approx(-0.176777).epsilon(1e-6));
    CHECK(q_second_x0(flat, 0.7, 0.02 - 0.05) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("uniform weights satisfy the moment conditions") {
    const auto w = uniform_weights();
    const std::array<double, 5> x{0, 1, 2, 3, 4};
    CHECK(moment(w, x, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(moment(w, x, 1) == doctest::Approx(25.0 / 6.0).epsilon(1e-15));
    CHECK(moment(w, x, 2) == doctest::Approx(2.0).epsilon(1e-15));
    for (int m = 3; m <= 5; ++m) CHECK(std::abs(moment(w, x, m)) <= 1e-12);
}

TEST_CASE("staggered weights satisfy the moment conditions") {
    for (auto gamma : {std::array<double, 4>{0.5, 1.0, 1.5, 2.0}, std::array<double, 4>{1, 2, 3, 4},
                       std::array<double, 4>{2, 4, 6, 8}, std::array<double, 4>{0.5, 1.0, 2.0, 3.0}}) {
        for (double h : {0.1, 0.03, 0.01}) {
            const auto sw = staggered_weights(h, gamma);
            CHECK(sw.b[4] == 1.0);
            const std::array<double, 5> x{0, gamma[0] * h, gamma[1] * h, gamma[2] * h, gamma[3] * h};
            const double scale1 = std::abs(sw.c0), scale2 = std::abs(sw.d0);
            CHECK(std::abs(moment(sw.b, x, 1) - sw.c0) <= 1e-10 * scale1);
            CHECK(std::abs(moment(sw.b, x, 2) / 2.0 - sw.d0) <= 1e-10 * scale2);
            for (int m = 3; m <= 5; ++m) {
                double mag = 0.0;
                for (int i = 0; i < 5; ++i) mag += std::abs(sw.b[i] * std::pow(x[i], m));
                CHECK(std::abs(moment(sw.b, x, m)) <= 1e-10 * mag);
            }
        }
    }
}

TEST_CASE("staggered weights reduce to the uniform row") {
    const auto sw = staggered_weights(1.0, {1, 2, 3, 4});
    const auto w = uniform_weights();
    const double ratio = sw.b[4] / w[4];
    CHECK(ratio == doctest::Approx(-8.0).epsilon(1e-12));
    for (int i = 0; i < 5; ++i) CHECK(sw.b[i] == doctest::Approx(ratio * w[i]).epsilon(1e-12));
    CHECK(sw.c0 == doctest::Approx(ratio * 25.0 / 6.0).epsilon(1e-12));
    CHECK(sw.d0 == doctest::Approx(ratio).epsilon(1e-12));
    CHECK_FALSE(sw.from_moment_solve);
}

TEST_CASE("closed-form staggered weights match the moment oracle") {
    const double h = 0.1;
    const std::array<double, 4> gamma{0.5, 1.0, 1.5, 2.0};
    const auto sw = staggered_weights(h, gamma);
    // b_1..b_3 with b_4 = 1 from m = 3, 4, 5
    const std::vector<double> off{0.05, 0.1, 0.15};
    const std::vector<int> powers{3, 4, 5};
    std::vector<double> targets;
    for (int m : powers) targets.push_back(-std::pow(0.2, m));
    const auto b = moment_oracle(off, powers, targets);
    for (int i = 0; i < 3; ++i) CHECK(sw.b[i + 1] == doctest::Approx(b[i]).epsilon(1e-10));
}

TEST_CASE("coincident offsets are rejected") {
    CHECK_THROWS_AS(staggered_weights(0.1, {0.5, 0.5, 1.5, 2.0}), Error);
    CHECK_THROWS_AS(staggered_weights(0.1, {1.0, 0.5, 1.5, 2.0}), Error);
}

TEST_CASE("boundary derivative inverts its forward model") {
    struct Case {
        GridMode mode;
        bool staggered;
        std::array<double, 4> gamma;
    };
    const Case cases[] = {{GridMode::Uniform, false, {1, 2, 3, 4}},
                          {GridMode::Uniform, true, {1, 2, 3, 4}},
                          {GridMode::Refined, true, {0.5, 1.0, 1.5, 2.0}},
                          {GridMode::Refined, false, {1, 2, 3, 4}}};
    for (const auto& c : cases) {
        GridSpec spec;
        spec.h = 0.06;
        spec.mode = c.mode;
        spec.gamma = c.gamma;
        const Grid grid = build(spec);
        const auto st = c.staggered ? staggered_stencil(grid, spec) : uniform_stencil(grid);
        for (double alpha : {-1.0, -1.0 / 3.0, 0.0, 0.5}) {
            const auto m = model(9.0, alpha);
            for (double sf : {0.9, 0.62}) {
                for (double g_true : {0.0, 0.37, -2.5}) {
                    const auto p = quadratic_profile(st, grid, q_prime_x0(m, sf), q_second_x0(m, sf, g_true));
                    const auto d = boundary_derivative(p, st, m, sf);
                    CHECK(std::abs(d.g - g_true) <= 1e-10 * std::max(1.0, std::abs(g_true)));
                }
            }
        }
    }
}

TEST_CASE("boundary derivative is affine in the sample term") {
    GridSpec spec;
    spec.h = 0.1;
    const Grid grid = build(spec);
    const auto st = uniform_stencil(grid);
    const auto m = model();
    SqrtProfile p{{0.1, 0.2, 0.28, 0.35}};
    const auto base = boundary_derivative(p, st, m, 0.85);
    p.q[2] += 0.01;
    const auto bumped = boundary_derivative(p, st, m, 0.85);
    const double d_samples = bumped.m[3] - base.m[3];
    CHECK(d_samples == doctest::Approx(0.01 * st.node_weights[2]).epsilon(1e-12));
    CHECK(bumped.g - base.g == doctest::Approx(d_samples / base.m[0]).epsilon(1e-10));
}

TEST_CASE("a quintic perturbation moves g by O(eps)") {
    GridSpec spec;
    spec.h = 0.05;
    spec.mode = GridMode::Refined;
    spec.gamma = {0.5, 1.0, 1.5, 2.0};
    const Grid grid = build(spec);
    const auto st = staggered_stencil(grid, spec);
    const auto m = model();
    const double sf = 0.85;
    const auto p0 = quadratic_profile(st, grid, q_prime_x0(m, sf), q_second_x0(m, sf, 0.2));
    const double g0 = boundary_derivative(p0, st, m, sf).g;
    for (double eps : {1e-3, 1e-1}) {
        auto p = p0;
        for (std::size_t i = 0; i < 4; ++i) p.q[i] += eps * std::pow(grid.x(st.nodes[i]), 5);
        // the quintic moment is annihilated; only rounding remains
        CHECK(std::abs(boundary_derivative(p, st, m, sf).g - g0) <= eps);
    }
}

TEST_CASE("boundary derivative domain errors") {
    GridSpec spec;
    const Grid grid = build(spec);
    const auto st = uniform_stencil(grid);
    SqrtProfile p{{0.1, 0.2, 0.3, 0.4}};
    CHECK_THROWS_AS(boundary_derivative(p, st, model(), 0.0), Error);
    CHECK_THROWS_AS(boundary_derivative(p, st, model(9.0, -1.0 / 3.0, 0.0), 0.8), Error);
}

TEST_CASE("estimate stays finite for admissible inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sf(0.05, 0.9), q(0.0, 1.0);
    GridSpec spec;
    const Grid grid = build(spec);
    const auto st = uniform_stencil(grid);
    for (int t = 0; t < 100; ++t) {
        SqrtProfile p{{q(rng), q(rng), q(rng), q(rng)}};
        CHECK(std::isfinite(boundary_derivative(p, st, model(), sf(rng)).g));
    }
}
