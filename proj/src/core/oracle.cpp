#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace cevfb {

namespace {

// Solves the tridiagonal LCP  lower_j V_{j-1} + diag_j V_j + upper_j V_{j+1} >= rhs_j,
// V >= payoff, complementarity, by a backward-forward sweep. Exact for a put
// with a single exercise boundary.
void brennan_schwartz(const std::vector<double>& lower, const std::vector<double>& diag,
                      const std::vector<double>& upper, std::vector<double> rhs,
                      const std::vector<double>& payoff, std::vector<double>& v,
                      std::size_t first, std::size_t last) {
    std::vector<double> d(diag);
    // eliminate the upper diagonal from the far end
    for (std::size_t j = last; j-- > first;) {
        const double f = upper[j] / d[j + 1];
        d[j] -= f * lower[j + 1];
        rhs[j] -= f * rhs[j + 1];
    }
    v[first] = std::max(rhs[first] / d[first], payoff[first]);
    for (std::size_t j = first + 1; j <= last; ++j) {
        v[j] = std::max((rhs[j] - lower[j] * v[j - 1]) / d[j], payoff[j]);
    }
}

}  // namespace

LcpResult cn_psor_price(const ModelParams& params, const LcpGrid& g) {
    validate(params);
    if (g.spot_intervals < 2 || g.time_steps < 1 || g.implicit_steps < 0 ||
        !(g.omega > 0.0 && g.omega < 2.0) || !(g.tolerance > 0.0) || g.max_iterations < 1) {
        fail(ErrorCode::InvalidParameter, "invalid LCP grid");
    }
    const double k_strike = params.strike;
    const double s0 = params.spot;
    const double floor_max = 4.0 * std::max(k_strike, s0);
    const double s_max_req = std::max(g.s_max, floor_max);
    if (g.s_max > 0.0 && g.s_max < floor_max) {
        fail(ErrorCode::InvalidParameter, "S_max must be at least 4 max(K, S0)");
    }

    const auto per_spot = static_cast<long>(g.spot_intervals);
    const double ds = s0 / static_cast<double>(per_spot);
    const auto n = static_cast<std::size_t>(std::ceil(s_max_req / ds - 1e-9));
    const std::size_t nodes = n + 1;
    const std::size_t j0 = static_cast<std::size_t>(per_spot);

    std::vector<double> s(nodes), payoff(nodes), a(nodes), b(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        s[j] = static_cast<double>(j) * ds;
        payoff[j] = std::max(k_strike - s[j], 0.0);
        const double vol = j == 0 ? 0.0 : params.sigma * std::pow(s[j] / s0, params.alpha);
        a[j] = 0.5 * vol * vol * s[j] * s[j] / (ds * ds);
        b[j] = 0.5 * params.rate * s[j] / ds;
    }
    // L V_j = lo_j V_{j-1} + di_j V_j + up_j V_{j+1}  (the spatial generator)
    std::vector<double> lo(nodes), di(nodes), up(nodes);
    for (std::size_t j = 0; j < nodes; ++j) {
        lo[j] = a[j] - b[j];
        di[j] = -2.0 * a[j] - params.rate;
        up[j] = a[j] + b[j];
    }

    const double dt = params.maturity / static_cast<double>(g.time_steps);
    std::vector<double> v(payoff), rhs(nodes), ml(nodes), md(nodes), mu(nodes), prev(nodes);
    v[0] = k_strike;
    v[n] = 0.0;

    LcpResult out;
    auto record_boundary = [&](double tau) {
        double sb = 0.0;
        for (std::size_t j = 1; j < nodes && s[j] < k_strike; ++j) {
            if (v[j] - payoff[j] <= 1e-10 * k_strike) sb = s[j];
        }
        out.boundary.push_back({tau, sb});
    };
    record_boundary(0.0);

    for (int step = 0; step < g.time_steps; ++step) {
        const double theta = step < g.implicit_steps ? 1.0 : 0.5;
        for (std::size_t j = 1; j < n; ++j) {
            const double ex = (1.0 - theta) * dt;
            rhs[j] = v[j] + ex * (lo[j] * v[j - 1] + di[j] * v[j] + up[j] * v[j + 1]);
            ml[j] = -theta * dt * lo[j];
            md[j] = 1.0 - theta * dt * di[j];
            mu[j] = -theta * dt * up[j];
        }
        // Dirichlet ends fold into the rhs
        rhs[1] -= ml[1] * k_strike;
        ml[1] = 0.0;
        mu[n - 1] = 0.0;

        prev = v;
        if (g.warm_start) brennan_schwartz(ml, md, mu, rhs, payoff, v, 1, n - 1);

        int sweeps = 0;
        for (;;) {
            double change = 0.0;
            for (std::size_t j = 1; j < n; ++j) {
                const double gs = (rhs[j] - ml[j] * v[j - 1] - mu[j] * v[j + 1]) / md[j];
                const double next = std::max(payoff[j], v[j] + g.omega * (gs - v[j]));
                change = std::max(change, std::abs(next - v[j]));
                v[j] = next;
            }
            ++sweeps;
            if (change <= g.tolerance) break;
            if (sweeps >= g.max_iterations) {
                fail(ErrorCode::NonConvergence, "projected SOR hit the iteration cap");
            }
        }
        v[0] = k_strike;
        v[n] = 0.0;
        out.sor_sweeps += sweeps;
        out.max_sweeps_per_level = std::max(out.max_sweeps_per_level, sweeps);
        record_boundary(static_cast<double>(step + 1) * dt);
    }

    // local cubic through j0-1 .. j0+2; S0 is node j0
    const std::size_t lo_idx = j0 - 1;
    double value = 0.0, delta = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double li = 1.0, dli = 0.0;
        for (std::size_t m = 0; m < 4; ++m) {
            if (m == i) continue;
            const double denom = s[lo_idx + i] - s[lo_idx + m];
            double prod = 1.0 / denom;
            for (std::size_t q = 0; q < 4; ++q) {
                if (q == i || q == m) continue;
                prod *= (s0 - s[lo_idx + q]) / (s[lo_idx + i] - s[lo_idx + q]);
            }
            dli += prod;
            li *= (s0 - s[lo_idx + m]) / denom;
        }
        value += li * v[lo_idx + i];
        delta += dli * v[lo_idx + i];
    }
    out.value = value;
    out.delta = delta;
    out.asset = std::move(s);
    out.values = std::move(v);
    return out;
}

std::vector<double> moment_oracle(std::span<const double> offsets, std::span<const int> powers,
                                  std::span<const double> targets) {
    const std::size_t n = offsets.size();
    if (n == 0 || powers.size() != n || targets.size() != n) {
        fail(ErrorCode::InvalidParameter, "moment system must be square");
    }
    // Gauss-Jordan with complete pivoting in extended precision.
    std::vector<std::vector<long double>> m(n, std::vector<long double>(n + 1));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            m[r][c] = std::pow(static_cast<long double>(offsets[c]), powers[r]);
        }
        m[r][n] = targets[r];
    }
    std::vector<std::size_t> col(n);
    for (std::size_t c = 0; c < n; ++c) col[c] = c;
    long double scale = 0.0L;
    for (const auto& row : m) {
        for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::fabs(row[c]));
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        long double best = 0.0L;
        for (std::size_t r = k; r < n; ++r) {
            for (std::size_t c = k; c < n; ++c) {
                if (std::fabs(m[r][c]) > best) {
                    best = std::fabs(m[r][c]);
                    pr = r;
                    pc = c;
                }
            }
        }
        if (!(best > 1e-14L * scale)) fail(ErrorCode::Singular, "moment system is singular");
        std::swap(m[k], m[pr]);
        if (pc != k) {
            for (auto& row : m) std::swap(row[k], row[pc]);
            std::swap(col[k], col[pc]);
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k) continue;
            const long double f = m[r][k] / m[k][k];
            for (std::size_t c = k; c <= n; ++c) m[r][c] -= f * m[k][c];
        }
    }
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[col[k]] = static_cast<double>(m[k][n] / m[k][k]);
    return w;
}

std::vector<double> moment_oracle(std::span<const double> offsets,
                                  std::span<const double> targets) {
    std::vector<int> powers(offsets.size());
    for (std::size_t i = 0; i < powers.size(); ++i) powers[i] = static_cast<int>(i) + 1;
    return moment_oracle(offsets, powers, targets);
}

double polynomial_exactness(const LinearStencil& stencil, int degree) {
    double worst = 0.0;
    for (int p = 0; p <= degree; ++p) {
        double sum = 0.0, mag = 0.0;
        for (const auto& t : stencil) {
            if (t.derivative > p) continue;
            double coef = 1.0;
            for (int d = 0; d < t.derivative; ++d) coef *= static_cast<double>(p - d);
            const double term = t.weight * coef * std::pow(t.x, p - t.derivative);
            sum += term;
            mag += std::abs(term);
        }
        if (mag > 0.0) worst = std::max(worst, std::abs(sum) / mag);
    }
    return worst;
}

}  // namespace cevfb
