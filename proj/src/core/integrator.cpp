#include "core/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace cevfb {

const Tableau& Tableau::dormand_prince() {
    static const Tableau t = [] {
        Tableau d;
        d.c = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
        d.a[1] = {1.0 / 5.0};
        d.a[2] = {3.0 / 40.0, 9.0 / 40.0};
        d.a[3] = {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
        d.a[4] = {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0};
        d.a[5] = {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
                  -5103.0 / 18656.0};
        d.a[6] = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                  11.0 / 84.0};
        d.b5 = {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                11.0 / 84.0, 0.0};
        d.b4 = {5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
                -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};
        return d;
    }();
    return t;
}

void StepController::validate() const {
    auto bad = [](const char* what) { fail(ErrorCode::InvalidParameter, what); };
    if (!(tolerance > 0.0)) bad("tolerance must be positive");
    if (!(safety > 0.0 && safety <= 1.0)) bad("safety factor must lie in (0, 1]");
    if (!(min_factor > 0.0 && min_factor < 1.0 && max_factor > 1.0)) {
        bad("step factor limits must satisfy 0 < f_min < 1 < f_max");
    }
    if (!(min_step > 0.0)) bad("minimum step must be positive");
    if (max_step < 0.0 || (max_step > 0.0 && max_step < min_step)) bad("invalid maximum step");
    if (!(initial_step > 0.0)) bad("initial step must be positive");
    if (max_min_step_hits < 1) bad("max_min_step_hits must be positive");
}

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b, std::size_t lo,
                    std::size_t hi) {
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double d = std::abs(a[i] - b[i]);
        if (!(d <= m)) m = d;  // propagates NaN
    }
    return m;
}

}  // namespace

StepResult dp54_step(OdeSystem& system, std::span<const double> y, double k,
                     const StepController& controller,
                     std::span<const double> first_derivative) {
    const auto& t = Tableau::dormand_prince();
    const std::size_t n = system.size();
    std::array<std::vector<double>, 7> stages;
    std::vector<double> ys(n);

    int evaluations = 0;
    if (first_derivative.size() == n) {
        stages[0].assign(first_derivative.begin(), first_derivative.end());
    } else {
        stages[0].resize(n);
        system.evaluate(y, stages[0]);
        ++evaluations;
    }
    for (std::size_t s = 1; s < 7; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s; ++j) acc += t.a[s][j] * stages[j][i];
            ys[i] = y[i] + k * acc;
        }
        stages[s].resize(n);
        system.evaluate(ys, stages[s]);
        ++evaluations;
    }

    StepResult r;
    r.y5 = ys;  // the last stage point is the fifth-order solution
    r.y4.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 7; ++j) acc += t.b4[j] * stages[j][i];
        r.y4[i] = y[i] + k * acc;
    }
    r.last_derivative = std::move(stages[6]);

    const std::size_t split = system.split();
    r.report.e_u = max_abs_diff(r.y5, r.y4, 0, split);
    r.report.e_w = max_abs_diff(r.y5, r.y4, split, n);
    r.report.e = std::isnan(r.report.e_u) || std::isnan(r.report.e_w)
                     ? std::numeric_limits<double>::quiet_NaN()
                     : std::max(r.report.e_u, r.report.e_w);
    r.report.accepted = r.report.e <= controller.tolerance;
    r.report.k_used = k;
    r.report.stages = evaluations;
    return r;
}

double next_step(double e, double k_old, const StepController& c, double remaining) {
    double factor;
    if (e <= 0.0) {
        factor = c.max_factor;
    } else {
        const double p = e < c.tolerance ? 0.25 : 0.2;
        factor = c.safety * std::pow(c.tolerance / e, p);
    }
    factor = std::clamp(factor, c.min_factor, c.max_factor);
    double k = factor * k_old;
    const double upper = c.max_step > 0.0 ? std::min(c.max_step, remaining) : remaining;
    k = std::min(k, upper);
    return std::max(k, c.min_step);
}

AdvanceResult advance(OdeSystem& system, std::vector<double> y, double tau0, double horizon,
                      StepController c, const AcceptObserver& on_accept) {
    c.validate();
    if (y.size() != system.size()) fail(ErrorCode::InvalidParameter, "advance: state size mismatch");
    AdvanceResult out;
    out.tau = tau0;
    if (!(horizon > tau0)) {
        out.y = std::move(y);
        return out;
    }
    if (c.max_step == 0.0) c.max_step = std::max((horizon - tau0) / 10.0, c.min_step);

    const double end_slack = 1e-14 * std::max(1.0, std::abs(horizon));
    double tau = tau0;
    double k = std::clamp(c.initial_step, c.min_step, c.max_step);
    std::vector<double> fsal;
    int min_hits = 0;

    while (horizon - tau > end_slack) {
        const double remaining = horizon - tau;
        const bool last = k >= remaining;
        if (last) k = remaining;

        StepReport report;
        StepResult step;
        bool escaped = false;
        try {
            step = dp54_step(system, y, k, c, fsal);
            report = step.report;
        } catch (const Error& err) {
            if (err.code() != ErrorCode::BoundaryEscape) throw;
            escaped = true;
        }
        if (escaped || std::isnan(report.e)) {
            out.log.push_back({tau, k, std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity(), false});
            ++out.rejected;
            k = std::max(0.5 * k, c.min_step);
        } else if (report.accepted) {
            y = std::move(step.y5);
            fsal = std::move(step.last_derivative);
            out.log.push_back({tau, k, report.e_u, report.e_w, true});
            tau = last || horizon - (tau + k) <= end_slack ? horizon : tau + k;
            ++out.accepted;
            if (on_accept) on_accept(tau, y, k);
            k = next_step(report.e, k, c, std::max(horizon - tau, c.min_step));
        } else {
            out.log.push_back({tau, k, report.e_u, report.e_w, false});
            ++out.rejected;
            k = next_step(report.e, k, c, remaining);
        }

        if (k <= c.min_step) {
            if (++min_hits > c.max_min_step_hits) {
                fail(ErrorCode::Stagnation, "step size pinned at the minimum");
            }
        } else {
            min_hits = 0;
        }
    }
    out.y = std::move(y);
    out.tau = tau;
    return out;
}

AdvanceResult advance_fixed(OdeSystem& system, std::vector<double> y, double tau0,
                            double horizon, double k, const AcceptObserver& on_accept) {
    if (!(k > 0.0)) fail(ErrorCode::InvalidParameter, "fixed step must be positive");
    AdvanceResult out;
    out.tau = tau0;
    if (!(horizon > tau0)) {
        out.y = std::move(y);
        return out;
    }
    const auto steps = std::max<long>(1, std::lround((horizon - tau0) / k));
    const double dk = (horizon - tau0) / static_cast<double>(steps);
    StepController c;
    c.tolerance = std::numeric_limits<double>::infinity();
    std::vector<double> fsal;
    for (long n = 0; n < steps; ++n) {
        auto step = dp54_step(system, y, dk, c, fsal);
        if (std::isnan(step.report.e)) fail(ErrorCode::NonConvergence, "fixed-step integration diverged");
        const double tau = n + 1 == steps ? horizon : tau0 + static_cast<double>(n + 1) * dk;
        out.log.push_back({tau0 + static_cast<double>(n) * dk, dk, step.report.e_u, step.report.e_w, true});
        y = std::move(step.y5);
        fsal = std::move(step.last_derivative);
        ++out.accepted;
        if (on_accept) on_accept(tau, y, dk);
    }
    out.y = std::move(y);
    out.tau = horizon;
    return out;
}

StageRefresh stage_refresh(std::span<const double> u, const ScaledModel& model,
                           const Grid& grid, const BoundaryStencil& stencil, double g_max) {
    const double e = model.scaled_strike;
    StageRefresh r;
    r.boundary = e - u[0];
    if (!std::isfinite(r.boundary) || !(r.boundary > 0.0) || r.boundary > e * (1.0 + 1e-8)) {
        fail(ErrorCode::BoundaryEscape, "stage boundary outside (0, E]");
    }
    r.delta_at_boundary = -r.boundary;
    const auto profile = q_profile(u, r.boundary, stencil.nodes, model, grid);
    const double g = boundary_derivative(profile, stencil, model, r.boundary).g;
    if (!std::isfinite(g)) fail(ErrorCode::BoundaryEscape, "non-finite boundary derivative");
    r.g = std::clamp(g, -g_max, 0.0);
    r.clamped = r.g != g;
    r.coeffs = coefficients(model, grid.nodes().first(grid.unknowns()), r.boundary, r.g);
    return r;
}

FreeBoundarySystem::FreeBoundarySystem(const ScaledModel& model, const Grid& grid,
                                       const SpatialOperators& ops,
                                       const BoundaryStencil& stencil)
    : model_(model), grid_(grid), ops_(ops), stencil_(stencil) {}

std::vector<double> FreeBoundarySystem::pack(const SolverState& state) const {
    std::vector<double> y;
    y.reserve(size());
    y.insert(y.end(), state.u.begin(), state.u.end());
    y.insert(y.end(), state.w.begin(), state.w.end());
    return y;
}

SolverState FreeBoundarySystem::unpack(std::span<const double> y, double tau) const {
    SolverState s;
    const std::size_t m = grid_.unknowns();
    s.tau = tau;
    s.u.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(m));
    s.w.assign(y.begin() + static_cast<std::ptrdiff_t>(m), y.end());
    s.boundary = model_.scaled_strike - s.u[0];
    return s;
}

void FreeBoundarySystem::evaluate(std::span<const double> y, std::span<double> dydt) {
    ++evaluations_;
    const std::size_t m = grid_.unknowns();
    auto refresh = stage_refresh(y.first(m), model_, grid_, stencil_);
    if (refresh.clamped) ++clamp_events_;
    SolverState s = unpack(y, 0.0);
    s.boundary = refresh.boundary;
    const auto u_xx = value_second_derivative(s, ops_.u);
    const auto ut = rhs_u(s, u_xx, refresh.coeffs, model_.rate());
    const auto wt = rhs_w(s, ops_.w, u_xx, refresh.coeffs);
    std::copy(ut.begin(), ut.end(), dydt.begin());
    std::copy(wt.begin(), wt.end(), dydt.begin() + static_cast<std::ptrdiff_t>(m));
}

}  // namespace cevfb
