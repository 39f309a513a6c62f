#include "doctest.h"

#include <cmath>

#include "core/error.hpp"
#include "core/integrator.hpp"
#include "core/pricer.hpp"
#include "dense_reference.hpp"

using namespace cevfb;

namespace {

// y' = -lambda y, with an optional value above which evaluation fails
class Decay : public OdeSystem {
public:
    explicit Decay(double lambda = 1.0, double escape_above = INFINITY) : lambda_(lambda), escape_(escape_above) {}
    std::size_t size() const override { return 1; }
    std::size_t split() const override { return 1; }
    void evaluate(std::span<const double> y, std::span<double> dy) override {
        ++calls;
        if (y[0] > escape_) fail(ErrorCode::BoundaryEscape, "escaped");
        dy[0] = -lambda_ * y[0];
    }
    int calls = 0;

private:
    double lambda_;
    double escape_;
};

// (t, p) with t' = 1, p' = 4 t^3
class Quartic : public OdeSystem {
public:
    std::size_t size() const override { return 2; }
    std::size_t split() const override { return 1; }
    void evaluate(std::span<const double> y, std::span<double> dy) override {
        dy[0] = 1.0;
        dy[1] = 4.0 * y[0] * y[0] * y[0];
    }
};

// y' = 1 but evaluation fails beyond 0.5
class Wall : public OdeSystem {
public:
    std::size_t size() const override { return 1; }
    std::size_t split() const override { return 1; }
    void evaluate(std::span<const double> y, std::span<double> dy) override {
        if (y[0] > 0.5) fail(ErrorCode::BoundaryEscape, "wall");
        dy[0] = 1.0;
    }
};

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        s = std::max(s, std::abs(b[i]));
    }
    return d / s;
}

ModelParams table1() { return {10.0, 0.5, 0.2, 0.05, -1.0 / 3.0, 10.0, 3.0}; }

}  // namespace

TEST_CASE("tableau row sums and order conditions") {
    const auto& t = Tableau::dormand_prince();
    for (int i = 0; i < 7; ++i) {
        double row = 0.0;
        for (int j = 0; j < 7; ++j) row += t.a[i][j];
        CHECK(std::abs(row - t.c[i]) <= 1e-15);
    }
    auto moment = [&](const std::array<double, 7>& b, int p) {
        double s = 0.0;
        for (int i = 0; i < 7; ++i) s += b[i] * std::pow(t.c[i], p);
        return s;
    };
    for (int p = 0; p <= 4; ++p) CHECK(std::abs(moment(t.b5, p) - 1.0 / (p + 1)) <= 1e-15);
    for (int p = 0; p <= 3; ++p) CHECK(std::abs(moment(t.b4, p) - 1.0 / (p + 1)) <= 1e-15);
    for (int j = 0; j < 7; ++j) CHECK(t.b5[j] == t.a[6][j]);
    CHECK(t.a[3][1] == -56.0 / 15.0);
    CHECK(t.a[4][0] == 19372.0 / 6561.0);
}

TEST_CASE("one step of the scalar decay fixture") {
    Decay sys;
    const std::vector<double> y{1.0};
    const auto r = dp54_step(sys, y, 0.1, {});
    CHECK(std::abs(r.y5[0] - 0.904837418) <= 1e-9);
    CHECK(std::abs(r.y5[0] - std::exp(-0.1)) <= 1e-8);
    CHECK(r.report.e >= 0.0);
    CHECK(r.report.stages == 7);
    // FSAL: the last derivative is f(y5)
    CHECK(r.last_derivative[0] == doctest::Approx(-r.y5[0]).epsilon(1e-15));
    const auto again = dp54_step(sys, r.y5, 0.1, {}, r.last_derivative);
    CHECK(again.report.stages == 6);
}

TEST_CASE("quartic forcing is integrated exactly by both orders") {
    Quartic sys;
    const std::vector<double> y{0.3, 0.0};
    const auto r = dp54_step(sys, y, 0.2, {});
    CHECK(r.y5[1] == doctest::Approx(std::pow(0.5, 4) - std::pow(0.3, 4)).epsilon(1e-14));
    CHECK(r.report.e <= 1e-15);
}

TEST_CASE("embedded error scales with the fifth power") {
    Decay sys;
    const std::vector<double> y{1.0};
    const double e1 = dp54_step(sys, y, 0.02, {}).report.e;
    const double e2 = dp54_step(sys, y, 0.01, {}).report.e;
    CHECK(e1 / e2 == doctest::Approx(32.0).epsilon(0.1));
}

TEST_CASE("step size update") {
    StepController c;
    c.max_step = 1.0;
    const double k = 1e-3;
    CHECK(next_step(c.tolerance, k, c, 1.0) == doctest::Approx(0.9 * k));
    CHECK(next_step(1e-4 * c.tolerance, k, c, 1.0) == doctest::Approx(5.0 * k));
    CHECK(next_step(1e3 * c.tolerance, k, c, 1.0) / k == doctest::Approx(0.226070).epsilon(1e-5));
    CHECK(next_step(1e4 * c.tolerance, k, c, 1.0) == doctest::Approx(0.2 * k));
    CHECK(next_step(0.0, k, c, 1.0) == doctest::Approx(5.0 * k));
    CHECK(next_step(1e-4 * c.tolerance, k, c, 2e-3) == doctest::Approx(2e-3));
    CHECK(next_step(1e30, 1e-12, c, 1.0) == c.min_step);
}

TEST_CASE("controller validation") {
    StepController c;
    c.safety = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.min_factor = 1.2;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.tolerance = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("advance lands on the horizon") {
    Decay sys(3.0);
    StepController c;
    c.tolerance = 1e-9;
    double last_tau = 0.0, sum = 0.0;
    bool increasing = true;
    const auto r = advance(sys, {1.0}, 0.0, 1.3, c, [&](double tau, std::span<const double>, double k) {
        increasing = increasing && tau > last_tau;
        last_tau = tau;
        sum += k;
    });
    CHECK(increasing);
    CHECK(r.tau == 1.3);
    CHECK(std::abs(sum - 1.3) <= 1e-12);
    CHECK(r.y[0] == doctest::Approx(std::exp(-3.9)).epsilon(1e-7));
    CHECK(r.accepted > 0);
    for (const auto& s : r.log) CHECK(s.k <= 0.13 + 1e-15);
}

TEST_CASE("zero horizon leaves the state alone") {
    Decay sys;
    const auto r = advance(sys, {0.7}, 0.5, 0.5, {});
    CHECK(r.y[0] == 0.7);
    CHECK(r.accepted == 0);
    CHECK(r.log.empty());
}

TEST_CASE("rejected attempts do not commit") {
    Decay sys(50.0);
    StepController c;
    c.initial_step = 0.1;
    c.tolerance = 1e-8;
    const auto r = advance(sys, {1.0}, 0.0, 0.2, c);
    CHECK(r.rejected > 0);
    CHECK(r.y[0] == doctest::Approx(std::exp(-10.0)).epsilon(1e-5));
    double tau = 0.0;
    for (const auto& s : r.log) {
        CHECK(s.tau == doctest::Approx(tau));
        if (s.accepted) tau += s.k;
    }
}

TEST_CASE("boundary escape halves the step and stagnation is reported") {
    Wall wall;
    StepController c;
    c.initial_step = 0.1;
    c.max_min_step_hits = 5;
    CHECK_THROWS_AS(advance(wall, {0.0}, 0.0, 1.0, c), Error);
    try {
        advance(wall, {0.0}, 0.0, 1.0, c);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Stagnation);
    }

    Decay hop(1.0, 1.5);
    StepController c2;
    c2.initial_step = 0.1;
    const auto r = advance(hop, {1.0}, 0.0, 0.5, c2);
    CHECK(r.tau == 0.5);
}

TEST_CASE("fixed-step advance") {
    Decay sys;
    const auto r = advance_fixed(sys, {1.0}, 0.0, 1.0, 0.01);
    CHECK(r.accepted == 100);
    CHECK(r.y[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(advance_fixed(sys, {1.0}, 0.0, 1.0, 0.0), Error);
}

TEST_CASE("stage refresh") {
    const auto m = scale({9.0, 0.5, 0.2, 0.05, -1.0 / 3.0, 10.0, 3.0});
    GridSpec spec;
    const Grid g = build(spec);
    const auto st = uniform_stencil(g);
    std::vector<double> u(g.unknowns(), 0.0);
    auto r = stage_refresh(u, m, g, st);
    CHECK(r.boundary == doctest::Approx(0.9));
    CHECK(r.delta_at_boundary == doctest::Approx(-0.9));
    CHECK(r.g <= 0.0);
    CHECK(r.coeffs.xi1.size() == g.unknowns());

    u[0] = 0.1;
    r = stage_refresh(u, m, g, st);
    CHECK(r.boundary == doctest::Approx(0.8));

    u[0] = 0.9;
    CHECK_THROWS_AS(stage_refresh(u, m, g, st), Error);
    u[0] = -1e-3;
    CHECK_THROWS_AS(stage_refresh(u, m, g, st), Error);
    u[0] = -1e-10;
    CHECK_NOTHROW(stage_refresh(u, m, g, st));
}

TEST_CASE("one coupled step matches the dense re-implementation") {
    for (auto scheme : {Scheme::Dcu, Scheme::Dcsl}) {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        cfg.h = 0.1;
        const Pricer pricer(table1(), cfg);
        FreeBoundarySystem sys(pricer.model(), pricer.grid(), pricer.operators(), pricer.stencil());

        const auto nodes = pricer.stencil().nodes;
        ref::Setup setup{10.0, 0.2, 0.05, -1.0 / 3.0, 10.0,
                         std::vector<double>(pricer.grid().nodes().begin(), pricer.grid().nodes().end()),
                         scheme == Scheme::Dcsl, pricer.grid().uniform_prefix(),
                         std::vector<std::size_t>(nodes.begin(), nodes.end())};
        const auto dense = ref::operators(setup);

        // start from a state a few steps in, where g is active
        auto y = sys.pack(initial_state(pricer.model(), pricer.grid()));
        y = advance_fixed(sys, y, 0.0, 1e-3, 1e-4).y;

        const auto ours = dp54_step(sys, y, 1e-4, {});
        const auto theirs = ref::dp_step(setup, dense, y, 1e-4);
        CHECK(rel_diff(ours.y5, theirs) <= 1e-12);

        std::vector<double> f(y.size());
        sys.evaluate(y, f);
        CHECK(rel_diff(f, ref::rhs(setup, dense, y)) <= 1e-12);
    }
}

TEST_CASE("boundary decreases across accepted steps") {
    SchemeConfig cfg;
    cfg.scheme = Scheme::Dcsl;
    cfg.h = 0.1;
    ModelParams p = table1();
    p.maturity = 0.01;
    const auto r = Pricer(p, cfg).run({}, {true, false});
    long violations = 0;
    for (std::size_t i = 1; i < r.history.size(); ++i) {
        if (!(r.history[i].boundary < r.history[i - 1].boundary)) ++violations;
    }
    MESSAGE("boundary monotonicity violations: " << violations);
    CHECK(violations == 0);
    CHECK(r.history.front().boundary == doctest::Approx(10.0));
}
