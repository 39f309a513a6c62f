#include "core/pricer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "core/error.hpp"

namespace cevfb {

namespace {

bool gamma_unset(const std::array<double, 4>& g) {
    return std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
}

constexpr std::array<double, 4> kUniformGamma{1.0, 2.0, 3.0, 4.0};
constexpr std::array<double, 4> kStaggeredGamma{0.5, 1.0, 1.5, 2.0};

// Degree-4 Lagrange interpolation through five points.
double lagrange5(const double* xs, const double* ys, double x) {
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        double li = 1.0;
        for (int j = 0; j < 5; ++j) {
            if (j != i) li *= (x - xs[j]) / (xs[i] - xs[j]);
        }
        sum += li * ys[i];
    }
    return sum;
}

}  // namespace

GridSpec grid_spec(const SchemeConfig& scheme, double x_max) {
    GridSpec spec;
    spec.h = scheme.h;
    spec.x_max = x_max;
    spec.refine_ratio = scheme.refine_ratio;
    spec.fine_intervals = scheme.fine_intervals;
    if (scheme.scheme == Scheme::Dcu) {
        spec.mode = GridMode::Uniform;
        spec.gamma = gamma_unset(scheme.gamma) ? kUniformGamma : scheme.gamma;
    } else {
        spec.mode = GridMode::Refined;
        spec.gamma = gamma_unset(scheme.gamma) ? kStaggeredGamma : scheme.gamma;
    }
    return spec;
}

EstimatorKind estimator_for(const SchemeConfig& scheme, const GridSpec& spec) {
    if (scheme.scheme == Scheme::Dcsl) return EstimatorKind::Staggered;
    return spec.gamma == kUniformGamma ? EstimatorKind::Uniform : EstimatorKind::Staggered;
}

Readout readout(const SolverState& state, const ScaledModel& model, const Grid& grid) {
    const double s0 = model.params.spot;
    const double sf = state.boundary;
    if (sf >= 1.0) return {model.params.strike - s0, -1.0};

    const double xs = -std::log(sf);
    const auto x = grid.nodes();
    const std::size_t n = x.size();
    if (xs > x[n - 1]) return {0.0, 0.0};

    // u_M = w_M = 0 at the far node, w_0 = -s_f.
    std::vector<double> u(state.u.begin(), state.u.end());
    u.push_back(0.0);
    std::vector<double> w;
    w.reserve(n);
    w.push_back(-sf);
    w.insert(w.end(), state.w.begin(), state.w.end());
    w.push_back(0.0);

    const auto it = std::lower_bound(x.begin(), x.end(), xs);
    const auto i = static_cast<std::ptrdiff_t>(it - x.begin());
    const auto lo = static_cast<std::size_t>(
        std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(i - 3, static_cast<std::ptrdiff_t>(n) - 5)));

    const double value = lagrange5(&x[lo], &u[lo], xs) * s0;
    // e^{x*} s_f = 1, so w(x*) is already dV/dS.
    const double delta = lagrange5(&x[lo], &w[lo], xs) / (std::exp(xs) * sf);
    return {value, delta};
}

Pricer::Pricer(const ModelParams& params, const SchemeConfig& scheme)
    : model_(scale(params)),
      spec_(grid_spec(scheme, params.x_max)),
      grid_(build(spec_)),
      ops_(assemble(grid_, model_)) {
    stencil_ = estimator_for(scheme, spec_) == EstimatorKind::Uniform
                   ? uniform_stencil(grid_)
                   : staggered_stencil(grid_, spec_);
}

template <class Advance>
PricingResult Pricer::execute(const RunOptions& options, Advance&& advance_fn) const {
    const auto t0 = std::chrono::steady_clock::now();
    FreeBoundarySystem system(model_, grid_, ops_, stencil_);
    const SolverState init = initial_state(model_, grid_);
    const double s0 = model_.params.spot;

    PricingResult out;
    if (options.record_history) out.history.push_back({0.0, init.boundary * s0});
    AcceptObserver observer;
    if (options.record_history) {
        observer = [&](double tau, std::span<const double> y, double) {
            out.history.push_back({tau, (model_.scaled_strike - y[0]) * s0});
        };
    }
    AdvanceResult adv = advance_fn(system, system.pack(init), observer);

    out.final_state = system.unpack(adv.y, adv.tau);
    const Readout r = readout(out.final_state, model_, grid_);
    out.value = r.value;
    out.delta = r.delta;
    out.boundary = out.final_state.boundary * s0;
    out.accepted = adv.accepted;
    out.rejected = adv.rejected;
    out.clamp_events = system.clamp_events();
    out.evaluations = system.evaluations();
    if (options.record_steps) out.steps = std::move(adv.log);
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

PricingResult Pricer::run(const StepController& controller, const RunOptions& options) const {
    const double horizon = model_.params.maturity;
    return execute(options, [&](OdeSystem& sys, std::vector<double> y, const AcceptObserver& obs) {
        return advance(sys, std::move(y), 0.0, horizon, controller, obs);
    });
}

PricingResult Pricer::run_fixed(double k, const RunOptions& options) const {
    const double horizon = model_.params.maturity;
    return execute(options, [&](OdeSystem& sys, std::vector<double> y, const AcceptObserver& obs) {
        return advance_fixed(sys, std::move(y), 0.0, horizon, k, obs);
    });
}

PricingResult price(const ModelParams& params, const SchemeConfig& scheme,
                    const StepController& controller, const RunOptions& options) {
    return Pricer(params, scheme).run(controller, options);
}

}  // namespace cevfb
