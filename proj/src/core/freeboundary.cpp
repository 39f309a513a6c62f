#include "core/freeboundary.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/linalg.hpp"

namespace cevfb {

namespace {

void require_boundary(double boundary) {
    if (!(boundary > 0.0) || !std::isfinite(boundary)) {
        fail(ErrorCode::Domain, "boundary level must be positive");
    }
}

// Residual of sum b_i h_i^m against the c0/d0 targets for m = 1..5, scaled by
// the weight magnitudes.
double moment_residual(const std::array<double, 5>& b, const std::array<double, 5>& off,
                       double c0, double d0) {
    double worst = 0.0;
    for (int m = 1; m <= 5; ++m) {
        double sum = 0.0;
        double scale = 0.0;
        for (std::size_t i = 1; i < 5; ++i) {
            const double t = b[i] * std::pow(off[i], m);
            sum += t;
            scale += std::abs(t);
        }
        const double target = m == 1 ? c0 : (m == 2 ? 2.0 * d0 : 0.0);
        worst = std::max(worst, std::abs(sum - target) / std::max(scale, 1e-300));
    }
    return worst;
}

}  // namespace

SqrtProfile q_profile(std::span<const double> u, double boundary,
                      std::span<const std::size_t> nodes,
                      const ScaledModel& model, const Grid& grid) {
    require_boundary(boundary);
    SqrtProfile p;
    p.q.reserve(nodes.size());
    for (const auto i : nodes) {
        const double ui = i < u.size() ? u[i] : 0.0;
        const double radicand = ui - model.scaled_strike + std::exp(grid.x(i)) * boundary;
        p.q.push_back(std::sqrt(std::max(radicand, 0.0)));
    }
    return p;
}

double q_prime_x0(const ScaledModel& model, double boundary) {
    require_boundary(boundary);
    const double root = std::sqrt(model.rate() * model.scaled_strike);
    return root / (model.sigma() * std::pow(boundary, 0.5 * model.beta));
}

double q_second_x0(const ScaledModel& model, double boundary, double g) {
    require_boundary(boundary);
    const double s = model.sigma();
    const double beta = model.beta;
    const double root = std::sqrt(model.rate() * model.scaled_strike);
    const double xi2 = model.rate() - 0.5 * s * s * std::pow(boundary, beta) + g;
    return -beta * root / (3.0 * s * std::pow(boundary, 0.5 * beta)) -
           2.0 * xi2 * root / (3.0 * s * s * s * std::pow(boundary, 1.5 * beta));
}

std::array<double, 5> uniform_weights() {
    return {-415.0 / 72.0, 8.0, -3.0, 8.0 / 9.0, -1.0 / 8.0};
}

StaggeredWeights staggered_weights(double h, const std::array<double, 4>& gamma) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(gamma[i] > 0.0) || (i > 0 && !(gamma[i] > gamma[i - 1]))) {
            fail(ErrorCode::InvalidParameter,
                 "staggered offsets must satisfy 0 < gamma_1 < gamma_2 < gamma_3 < gamma_4");
        }
    }
    if (!(h > 0.0)) fail(ErrorCode::InvalidParameter, "staggered weights need h > 0");

    const double h1 = gamma[0] * h, h2 = gamma[1] * h, h3 = gamma[2] * h, h4 = gamma[3] * h;
    auto p = [](double v, int e) { return std::pow(v, e); };

    StaggeredWeights w;
    const double a3 = p(h2, 5) / p(h1, 5);
    const double a4 = p(h3, 5) / p(h2, 5);
    const double a5 = p(h4, 5) / p(h3, 5);
    const double a6 = (a4 * p(h2, 4) - p(h3, 4)) / (a3 * p(h1, 4) - p(h2, 4));
    const double a7 = (a5 * p(h3, 4) - p(h4, 4)) / (a4 * p(h2, 4) - p(h3, 4));
    const double a8 = (a7 * (a4 * p(h2, 3) - p(h3, 3)) - (a5 * p(h3, 3) - p(h4, 3))) /
                      (a6 * (a3 * p(h1, 3) - p(h2, 3)) - (a4 * p(h2, 3) - p(h3, 3)));
    w.a = {a3, a4, a5, a6, a7, a8};

    // Elimination of the m = 5, 4, 3 moments. b1, b3, c0 and d0 carry the
    // sign that makes the moment conditions hold.
    w.b[0] = a8 * (a6 * (a3 - 1.0) - (a4 - 1.0)) - (a7 * (a4 - 1.0) - (a5 - 1.0));
    w.b[1] = -a8 * a6 * a3;
    w.b[2] = a6 * a8 + a4 * a8 + a4 * a7;
    w.b[3] = -(a5 + a7 + a8);
    w.b[4] = 1.0;
    w.c0 = -(a8 * (a6 * (a3 * h1 - h2) - (a4 * h2 - h3)) -
             (a7 * (a4 * h2 - h3) - (a5 * h3 - h4)));
    w.d0 = -(0.5 * a8 * (a6 * (a3 * h1 * h1 - h2 * h2) - (a4 * h2 * h2 - h3 * h3)) -
             0.5 * (a7 * (a4 * h2 * h2 - h3 * h3) - (a5 * h3 * h3 - h4 * h4)));

    const std::array<double, 5> off{0.0, h1, h2, h3, h4};
    const bool finite = std::all_of(w.b.begin(), w.b.end(), [](double v) { return std::isfinite(v); }) &&
                        std::isfinite(w.c0) && std::isfinite(w.d0);
    if (!finite || moment_residual(w.b, off, w.c0, w.d0) > 1e-8) {
        // b4 = 1 and the m = 3, 4, 5 moments vanish.
        DenseMatrix a(3, 3);
        std::vector<double> rhs(3);
        for (int m = 3; m <= 5; ++m) {
            for (std::size_t j = 0; j < 3; ++j) a(m - 3, j) = std::pow(off[j + 1], m);
            rhs[m - 3] = -std::pow(h4, m);
        }
        const auto sol = solve_dense(std::move(a), rhs);
        w.b = {0.0, sol[0], sol[1], sol[2], 1.0};
        w.b[0] = -(w.b[1] + w.b[2] + w.b[3] + w.b[4]);
        w.c0 = 0.0;
        w.d0 = 0.0;
        for (std::size_t i = 1; i < 5; ++i) {
            w.c0 += w.b[i] * off[i];
            w.d0 += 0.5 * w.b[i] * off[i] * off[i];
        }
        w.from_moment_solve = true;
    }
    return w;
}

BoundaryStencil uniform_stencil(const Grid& grid) {
    if (grid.uniform_prefix() < 4) {
        fail(ErrorCode::GridSpec, "uniform estimator needs four equal intervals at x_0");
    }
    const double xbar = grid.boundary_spacing();
    const auto w = uniform_weights();
    BoundaryStencil s;
    s.kind = EstimatorKind::Uniform;
    s.nodes = {1, 2, 3, 4};
    s.node_weights = {w[1], w[2], w[3], w[4]};
    s.slope_weight = 25.0 / 6.0 * xbar;
    s.curvature_weight = xbar * xbar;
    return s;
}

BoundaryStencil staggered_stencil(const Grid& grid, const GridSpec& spec) {
    const auto nodes = gamma_nodes(grid, spec);
    const auto w = staggered_weights(spec.h, spec.gamma);
    BoundaryStencil s;
    s.kind = EstimatorKind::Staggered;
    s.nodes = nodes;
    s.node_weights = {w.b[1], w.b[2], w.b[3], w.b[4]};
    s.slope_weight = w.c0;
    s.curvature_weight = w.d0;
    return s;
}

BoundaryDerivative boundary_derivative(const SqrtProfile& profile,
                                       const BoundaryStencil& stencil,
                                       const ScaledModel& model, double boundary) {
    require_boundary(boundary);
    if (profile.q.size() != 4) {
        fail(ErrorCode::InvalidParameter, "boundary_derivative expects four samples");
    }
    const double re = model.rate() * model.scaled_strike;
    if (!(re > 0.0)) {
        fail(ErrorCode::Domain, "boundary_derivative requires r E > 0");
    }
    const double s = model.sigma();
    const double beta = model.beta;
    const double root = std::sqrt(re);
    const double half = std::pow(boundary, 0.5 * beta);
    const double three_half = std::pow(boundary, 1.5 * beta);
    const double nu = model.rate() - 0.5 * s * s * std::pow(boundary, beta);
    const double d = stencil.curvature_weight;

    BoundaryDerivative out;
    out.kind = stencil.kind;
    out.m[0] = -2.0 * d * root / (3.0 * s * s * s * three_half);
    out.m[1] = beta * d * root / (3.0 * s * half) + 2.0 * nu * d * root / (3.0 * s * s * s * three_half);
    out.m[2] = stencil.slope_weight * root / (s * half);
    double samples = 0.0;
    for (std::size_t i = 0; i < 4; ++i) samples += stencil.node_weights[i] * profile.q[i];
    out.m[3] = samples;
    out.g = (out.m[1] - out.m[2] + out.m[3]) / out.m[0];
    return out;
}

}  // namespace cevfb
