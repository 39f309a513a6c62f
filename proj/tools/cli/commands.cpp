#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <ostream>
#include <thread>
#include <vector>

namespace cevfb_cli {

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers; results stay in
// index order and the lowest-index failure is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, unsigned threads, F&& fn) {
    std::vector<R> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

void check(cevfb_status status, const std::string& context) {
    if (status == CEVFB_OK) return;
    std::string msg = context + ": " + cevfb_status_string(status);
    const std::string detail = cevfb_last_error();
    if (!detail.empty()) msg += " (" + detail + ")";
    if (status == CEVFB_ERR_INVALID_PARAMETER || status == CEVFB_ERR_GRID_SPEC ||
        status == CEVFB_ERR_MODE_MISMATCH) {
        throw ConfigError(msg);
    }
    throw NumericalFailure(msg);
}

std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string plain(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string strike_label(double k) { return plain(k); }

cevfb_model with_strike(const RunConfig& c, double strike) {
    cevfb_model m = c.model;
    m.strike = strike;
    return m;
}

struct RunHandle {
    cevfb_run* run = nullptr;
    RunHandle() = default;
    RunHandle(const RunHandle&) = delete;
    RunHandle& operator=(const RunHandle&) = delete;
    ~RunHandle() { cevfb_run_destroy(run); }
};

}  // namespace

void cmd_price(const RunConfig& c, const CommandOptions& opt, std::ostream& out) {
    const auto results = parallel_map<cevfb_result>(c.strikes.size(), opt.threads, [&](std::size_t i) {
        const cevfb_model m = with_strike(c, c.strikes[i]);
        cevfb_result r{};
        check(cevfb_price(&m, &c.scheme, &c.controller, &r), "K=" + strike_label(c.strikes[i]));
        return r;
    });
    out << "strike,scaled_value,value,delta,boundary,accepted,rejected";
    if (opt.timing) out << ",wall_seconds";
    out << "\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out << strike_label(c.strikes[i]) << ',' << fixed9(r.value / c.model.spot) << ','
            << fixed9(r.value) << ',' << fixed9(r.delta) << ',' << fixed9(r.boundary) << ','
            << r.accepted << ',' << r.rejected;
        if (opt.timing) out << ',' << fixed9(r.wall_seconds);
        out << "\n";
    }
}

void cmd_converge(const RunConfig& c, const CommandOptions& opt, std::ostream& out) {
    if (c.strikes.empty()) throw ConfigError("converge needs a strike");
    if (c.h_list.empty()) throw ConfigError("converge needs h_list");
    for (std::size_t i = 1; i < c.h_list.size(); ++i) {
        if (c.h_list[i] > c.h_list[i - 1]) throw ConfigError("h_list must be descending");
    }
    const cevfb_model m = with_strike(c, c.strikes.front());
    using Curve = std::vector<std::pair<double, double>>;
    const auto curves = parallel_map<Curve>(c.h_list.size(), opt.threads, [&](std::size_t i) {
        cevfb_scheme_config s = c.scheme;
        s.h = c.h_list[i];
        RunHandle run;
        check(cevfb_run_create_fixed(&m, &s, c.fixed_step, CEVFB_RECORD_HISTORY, &run.run),
              "h=" + plain(s.h));
        Curve curve(cevfb_run_history_size(run.run));
        for (std::size_t j = 0; j < curve.size(); ++j) {
            cevfb_run_history(run.run, j, &curve[j].first, &curve[j].second);
        }
        return curve;
    });

    out << "h,boundary,difference,max_tau_difference,order,flag\n";
    double prev_diff = 0.0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        out << plain(c.h_list[i]) << ',' << fixed9(curves[i].back().second);
        if (i == 0) {
            out << ",,,,\n";
            continue;
        }
        const double diff = std::abs(curves[i].back().second - curves[i - 1].back().second);
        double max_diff = 0.0;
        const std::size_t shared = std::min(curves[i].size(), curves[i - 1].size());
        for (std::size_t j = 0; j < shared; ++j) {
            max_diff = std::max(max_diff, std::abs(curves[i][j].second - curves[i - 1][j].second));
        }
        out << ',' << sci(diff) << ',' << sci(max_diff) << ',';
        if (i >= 2 && diff > 0.0 && prev_diff > 0.0) {
            const double ratio = c.h_list[i - 1] / c.h_list[i];
            out << plain(std::round(std::log(prev_diff / diff) / std::log(ratio) * 1e4) / 1e4);
        }
        out << ',' << (diff == 0.0 ? "zero" : "") << "\n";
        prev_diff = diff;
    }
}

void cmd_sweep(const RunConfig& c, const CommandOptions& opt, std::ostream& out) {
    if (c.eps_list.empty() && c.rho_list.empty()) throw ConfigError("sweep needs eps_list or rho_list");
    struct Task {
        const char* parameter;
        double setting;
        double strike;
    };
    std::vector<Task> tasks;
    for (double e : c.eps_list) {
        for (double k : c.strikes) tasks.push_back({"epsilon", e, k});
    }
    for (double r : c.rho_list) {
        for (double k : c.strikes) tasks.push_back({"rho", r, k});
    }
    const auto results = parallel_map<cevfb_result>(tasks.size(), opt.threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        cevfb_controller ctl = c.controller;
        if (t.parameter[0] == 'e') ctl.tolerance = t.setting;
        else ctl.safety = t.setting;
        const cevfb_model m = with_strike(c, t.strike);
        cevfb_result r{};
        check(cevfb_price(&m, &c.scheme, &ctl, &r),
              std::string(t.parameter) + "=" + plain(t.setting));
        return r;
    });
    out << "parameter,setting,strike,value,delta,accepted,rejected\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        out << tasks[i].parameter << ',' << plain(tasks[i].setting) << ','
            << strike_label(tasks[i].strike) << ',' << fixed9(results[i].value) << ','
            << fixed9(results[i].delta) << ',' << results[i].accepted << ','
            << results[i].rejected << "\n";
    }
}

long cmd_boundary(const RunConfig& c, const CommandOptions& opt, std::ostream& out) {
    const int flags = CEVFB_RECORD_HISTORY | (opt.step_log.empty() ? 0 : CEVFB_RECORD_STEPS);
    auto runs = parallel_map<std::shared_ptr<cevfb_run>>(c.strikes.size(), opt.threads, [&](std::size_t i) {
        const cevfb_model m = with_strike(c, c.strikes[i]);
        cevfb_run* run = nullptr;
        check(cevfb_run_create(&m, &c.scheme, &c.controller, flags, &run),
              "K=" + strike_label(c.strikes[i]));
        return std::shared_ptr<cevfb_run>(run, cevfb_run_destroy);
    });

    long violations = 0;
    out << "strike,tau,boundary,k\n";
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const cevfb_run* run = runs[i].get();
        double prev_tau = 0.0, prev_b = 0.0;
        for (std::size_t j = 0; j < cevfb_run_history_size(run); ++j) {
            double tau = 0.0, b = 0.0;
            cevfb_run_history(run, j, &tau, &b);
            out << strike_label(c.strikes[i]) << ',' << fixed9(tau) << ',' << fixed9(b) << ',';
            if (j > 0) {
                out << sci(tau - prev_tau);
                if (b > prev_b) ++violations;
            }
            out << "\n";
            prev_tau = tau;
            prev_b = b;
        }
    }

    if (!opt.step_log.empty()) {
        std::ofstream log(opt.step_log);
        if (!log) throw ConfigError(opt.step_log + ": cannot open for writing");
        log << "strike,tau,k,e_u,e_w,accepted\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            for (std::size_t j = 0; j < cevfb_run_step_count(runs[i].get()); ++j) {
                cevfb_step s{};
                cevfb_run_step(runs[i].get(), j, &s);
                log << strike_label(c.strikes[i]) << ',' << fixed9(s.tau) << ',' << sci(s.k) << ','
                    << sci(s.e_u) << ',' << sci(s.e_w) << ',' << s.accepted << "\n";
            }
        }
    }
    return violations;
}

}  // namespace cevfb_cli
