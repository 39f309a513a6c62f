#include "core/model.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/grid.hpp"

namespace cevfb {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) fail(ErrorCode::InvalidParameter, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void validate(const ModelParams& p) {
    require(finite_positive(p.strike), "strike must be positive");
    require(finite_positive(p.maturity), "maturity must be positive");
    require(finite_positive(p.sigma), "sigma must be positive");
    require(finite_positive(p.spot), "spot must be positive");
    require(finite_positive(p.x_max), "x_max must be positive");
    require(std::isfinite(p.rate) && p.rate >= 0.0, "rate must be non-negative");
    require(std::isfinite(p.alpha) && std::abs(p.alpha) <= 1.0,
            "alpha must lie in [-1, 1]");
}

ScaledModel scale(const ModelParams& params) {
    validate(params);
    ScaledModel m;
    m.params = params;
    m.scaled_strike = params.strike / params.spot;
    m.beta = 2.0 * params.alpha;
    return m;
}

CoefficientField coefficients(const ScaledModel& model,
                              std::span<const double> x,
                              double boundary,
                              double g) {
    if (!(boundary > 0.0) || !std::isfinite(boundary)) {
        fail(ErrorCode::Domain, "coefficients: boundary level must be positive");
    }
    const double sigma2 = model.sigma() * model.sigma();
    const double r = model.rate();
    const double alpha = model.alpha();
    const double log_sf = std::log(boundary);

    CoefficientField c;
    const auto n = x.size();
    c.xi1.resize(n);
    c.xi2.resize(n);
    c.xi3.resize(n);
    c.xi4.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // sigma^2 (e^x s_f)^{2 alpha}
        const double local = alpha == 0.0 ? sigma2 : sigma2 * std::exp(model.beta * (x[i] + log_sf));
        c.xi1[i] = 0.5 * local;
        c.xi2[i] = r + g - c.xi1[i];
        c.xi3[i] = c.xi2[i] + alpha * local;
        c.xi4[i] = r + alpha * local;
    }
    return c;
}

SolverState initial_state(const ScaledModel& model, const Grid& grid) {
    SolverState s;
    s.tau = 0.0;
    s.boundary = model.scaled_strike;
    const std::size_t m = grid.unknowns();
    s.u.assign(m, 0.0);
    s.w.assign(m - 1, 0.0);
    s.u[0] = model.scaled_strike - s.boundary;
    return s;
}

}  // namespace cevfb
