#include "cevfb/cevfb.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "core/error.hpp"
#include "core/oracle.hpp"
#include "core/pricer.hpp"

using namespace cevfb;

struct cevfb_run {
    Grid grid;
    PricingResult result;
};

namespace {

thread_local std::string last_error;

cevfb_status to_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParameter: return CEVFB_ERR_INVALID_PARAMETER;
    case ErrorCode::Domain: return CEVFB_ERR_DOMAIN;
    case ErrorCode::GridSpec: return CEVFB_ERR_GRID_SPEC;
    case ErrorCode::ModeMismatch: return CEVFB_ERR_MODE_MISMATCH;
    case ErrorCode::Singular: return CEVFB_ERR_SINGULAR;
    case ErrorCode::BoundaryEscape: return CEVFB_ERR_BOUNDARY_ESCAPE;
    case ErrorCode::Stagnation: return CEVFB_ERR_STAGNATION;
    case ErrorCode::NonConvergence: return CEVFB_ERR_NON_CONVERGENCE;
    case ErrorCode::ConfigParse: return CEVFB_ERR_INVALID_PARAMETER;
    }
    return CEVFB_ERR_INTERNAL;
}

template <class F>
cevfb_status guarded(F&& body) {
    last_error.clear();
    try {
        body();
        return CEVFB_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return CEVFB_ERR_INTERNAL;
}

cevfb_status null_arg(const char* what) {
    last_error = std::string("null argument: ") + what;
    return CEVFB_ERR_NULL_ARGUMENT;
}

cevfb_status out_of_range() {
    last_error = "index out of range";
    return CEVFB_ERR_OUT_OF_RANGE;
}

ModelParams to_core(const cevfb_model& m) {
    return {m.strike, m.maturity, m.sigma, m.rate, m.alpha, m.spot, m.x_max};
}

SchemeConfig to_core(const cevfb_scheme_config& s) {
    SchemeConfig c;
    if (s.scheme != CEVFB_SCHEME_DCU && s.scheme != CEVFB_SCHEME_DCSL) {
        fail(ErrorCode::InvalidParameter, "unknown scheme");
    }
    c.scheme = s.scheme == CEVFB_SCHEME_DCU ? Scheme::Dcu : Scheme::Dcsl;
    c.h = s.h;
    c.refine_ratio = s.refine_ratio;
    c.fine_intervals = s.fine_intervals;
    for (int i = 0; i < 4; ++i) c.gamma[i] = s.gamma[i];
    return c;
}

StepController to_core(const cevfb_controller* c) {
    StepController out;
    if (!c) return out;
    out.tolerance = c->tolerance;
    out.safety = c->safety;
    out.min_factor = c->min_factor;
    out.max_factor = c->max_factor;
    out.min_step = c->min_step;
    out.max_step = c->max_step;
    out.initial_step = c->initial_step;
    out.max_min_step_hits = c->max_min_step_hits;
    return out;
}

void fill(const PricingResult& r, cevfb_result* out) {
    out->value = r.value;
    out->delta = r.delta;
    out->boundary = r.boundary;
    out->accepted = r.accepted;
    out->rejected = r.rejected;
    out->clamp_events = r.clamp_events;
    out->evaluations = r.evaluations;
    out->wall_seconds = r.wall_seconds;
}

RunOptions options(int flags) {
    return {(flags & CEVFB_RECORD_HISTORY) != 0, (flags & CEVFB_RECORD_STEPS) != 0};
}

}  // namespace

extern "C" {

const char* cevfb_version(void) { return "1.0.0"; }

const char* cevfb_status_string(cevfb_status status) {
    switch (status) {
    case CEVFB_OK: return "ok";
    case CEVFB_ERR_NULL_ARGUMENT: return "null argument";
    case CEVFB_ERR_INVALID_PARAMETER: return "invalid parameter";
    case CEVFB_ERR_DOMAIN: return "domain error";
    case CEVFB_ERR_GRID_SPEC: return "invalid grid specification";
    case CEVFB_ERR_MODE_MISMATCH: return "grid mode mismatch";
    case CEVFB_ERR_SINGULAR: return "singular system";
    case CEVFB_ERR_BOUNDARY_ESCAPE: return "boundary left the admissible range";
    case CEVFB_ERR_STAGNATION: return "step size stagnated";
    case CEVFB_ERR_NON_CONVERGENCE: return "no convergence";
    case CEVFB_ERR_OUT_OF_RANGE: return "index out of range";
    case CEVFB_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* cevfb_last_error(void) { return last_error.c_str(); }

void cevfb_model_defaults(cevfb_model* model) {
    if (!model) return;
    const ModelParams p;
    *model = {p.strike, p.maturity, p.sigma, p.rate, p.alpha, p.spot, p.x_max};
}

void cevfb_scheme_defaults(cevfb_scheme_config* scheme, cevfb_scheme kind) {
    if (!scheme) return;
    const SchemeConfig c;
    *scheme = {};
    scheme->scheme = kind;
    scheme->h = c.h;
    scheme->refine_ratio = c.refine_ratio;
    scheme->fine_intervals = c.fine_intervals;
}

void cevfb_controller_defaults(cevfb_controller* controller) {
    if (!controller) return;
    const StepController c;
    *controller = {c.tolerance, c.safety,    c.min_factor,   c.max_factor,
                   c.min_step,  c.max_step,  c.initial_step, c.max_min_step_hits};
}

void cevfb_lcp_defaults(cevfb_lcp_grid* grid) {
    if (!grid) return;
    const LcpGrid g;
    *grid = {g.s_max, g.spot_intervals, g.time_steps, g.implicit_steps,
             g.omega, g.tolerance,      g.max_iterations, g.warm_start ? 1 : 0};
}

cevfb_status cevfb_price(const cevfb_model* model, const cevfb_scheme_config* scheme,
                         const cevfb_controller* controller, cevfb_result* out) {
    if (!model) return null_arg("model");
    if (!scheme) return null_arg("scheme");
    if (!out) return null_arg("out");
    return guarded([&] { fill(price(to_core(*model), to_core(*scheme), to_core(controller)), out); });
}

cevfb_status cevfb_run_create(const cevfb_model* model, const cevfb_scheme_config* scheme,
                              const cevfb_controller* controller, int flags, cevfb_run** out) {
    if (!model) return null_arg("model");
    if (!scheme) return null_arg("scheme");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const Pricer pricer(to_core(*model), to_core(*scheme));
        *out = new cevfb_run{pricer.grid(), pricer.run(to_core(controller), options(flags))};
    });
}

cevfb_status cevfb_run_create_fixed(const cevfb_model* model, const cevfb_scheme_config* scheme,
                                    double k, int flags, cevfb_run** out) {
    if (!model) return null_arg("model");
    if (!scheme) return null_arg("scheme");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const Pricer pricer(to_core(*model), to_core(*scheme));
        *out = new cevfb_run{pricer.grid(), pricer.run_fixed(k, options(flags))};
    });
}

void cevfb_run_destroy(cevfb_run* run) { delete run; }

cevfb_status cevfb_run_result(const cevfb_run* run, cevfb_result* out) {
    if (!run) return null_arg("run");
    if (!out) return null_arg("out");
    fill(run->result, out);
    return CEVFB_OK;
}

size_t cevfb_run_history_size(const cevfb_run* run) {
    return run ? run->result.history.size() : 0;
}

cevfb_status cevfb_run_history(const cevfb_run* run, size_t index, double* tau,
                               double* boundary) {
    if (!run) return null_arg("run");
    if (index >= run->result.history.size()) return out_of_range();
    const auto& s = run->result.history[index];
    if (tau) *tau = s.tau;
    if (boundary) *boundary = s.boundary;
    return CEVFB_OK;
}

size_t cevfb_run_step_count(const cevfb_run* run) { return run ? run->result.steps.size() : 0; }

cevfb_status cevfb_run_step(const cevfb_run* run, size_t index, cevfb_step* out) {
    if (!run) return null_arg("run");
    if (!out) return null_arg("out");
    if (index >= run->result.steps.size()) return out_of_range();
    const auto& s = run->result.steps[index];
    *out = {s.tau, s.k, s.e_u, s.e_w, s.accepted ? 1 : 0};
    return CEVFB_OK;
}

size_t cevfb_run_node_count(const cevfb_run* run) { return run ? run->grid.node_count() : 0; }

cevfb_status cevfb_run_state(const cevfb_run* run, double* x, double* u, double* w) {
    if (!run) return null_arg("run");
    const auto nodes = run->grid.nodes();
    const auto& st = run->result.final_state;
    if (x) std::copy(nodes.begin(), nodes.end(), x);
    if (u) std::copy(st.u.begin(), st.u.end(), u);
    if (w) std::copy(st.w.begin(), st.w.end(), w);
    return CEVFB_OK;
}

cevfb_status cevfb_oracle_price(const cevfb_model* model, const cevfb_lcp_grid* grid,
                                cevfb_lcp_result* out) {
    if (!model) return null_arg("model");
    if (!out) return null_arg("out");
    return guarded([&] {
        LcpGrid g;
        if (grid) {
            g.s_max = grid->s_max;
            g.spot_intervals = grid->spot_intervals;
            g.time_steps = grid->time_steps;
            g.implicit_steps = grid->implicit_steps;
            g.omega = grid->omega;
            g.tolerance = grid->tolerance;
            g.max_iterations = grid->max_iterations;
            g.warm_start = grid->warm_start != 0;
        }
        const LcpResult r = cn_psor_price(to_core(*model), g);
        *out = {r.value, r.delta, r.sor_sweeps, r.max_sweeps_per_level};
    });
}

}  // extern "C"
