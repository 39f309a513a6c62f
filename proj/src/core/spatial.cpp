#include "core/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace cevfb {

namespace {

double hermitian_residual(const HermitianCoefficients& c, double hl, double hr) {
    // Monomials about the centre node, degrees 0..4.
    double worst = 0.0;
    for (int m = 0; m <= 4; ++m) {
        auto f = [m](double x) { return std::pow(x, m); };
        auto f2 = [m](double x) { return m < 2 ? 0.0 : m * (m - 1) * std::pow(x, m - 2); };
        const double lhs = c.d1 * f2(-hl) + f2(0.0) + c.d3 * f2(hr);
        const double rhs = c.e1 * f(-hl) + c.e2 * f(0.0) + c.e3 * f(hr);
        const double scale = std::abs(c.d1 * f2(-hl)) + std::abs(f2(0.0)) + std::abs(c.d3 * f2(hr)) +
                             std::abs(c.e1 * f(-hl)) + std::abs(c.e2 * f(0.0)) + std::abs(c.e3 * f(hr));
        if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

HermitianCoefficients hermitian_from_moments(double hl, double hr) {
    // Unknowns (d1, d3, e1, e2, e3); exactness on 1, x, ..., x^4 about the
    // centre node.
    DenseMatrix a(5, 5);
    std::vector<double> rhs(5, 0.0);
    const double xs[3] = {-hl, 0.0, hr};
    for (int m = 0; m <= 4; ++m) {
        auto f2 = [m](double x) { return m < 2 ? 0.0 : m * (m - 1) * std::pow(x, m - 2); };
        a(m, 0) = f2(xs[0]);
        a(m, 1) = f2(xs[2]);
        for (int j = 0; j < 3; ++j) a(m, 2 + j) = -std::pow(xs[j], m);
        rhs[m] = -f2(0.0);
    }
    const auto s = solve_dense(std::move(a), rhs);
    return {s[0], s[1], s[2], s[3], s[4]};
}

void check_dominance(const BandedMatrix& a, const char* name) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        double off = 0.0;
        for (std::size_t j = (i >= a.lower() ? i - a.lower() : 0); j <= std::min(a.size() - 1, i + a.upper()); ++j) {
            if (j != i) off += std::abs(a.get(i, j));
        }
        if (!(std::abs(a.get(i, i)) > off)) {
            std::ostringstream os;
            os << name << ": row " << i << " is not diagonally dominant";
            fail(ErrorCode::Singular, os.str());
        }
    }
}

void check_mode(const Grid& grid, GridMode mode) {
    if (grid.mode() != mode) fail(ErrorCode::ModeMismatch, "operator mode does not match the grid");
}

}  // namespace

HermitianCoefficients hermitian_coeffs(double hl, double hr) {
    if (!(hl > 0.0) || !(hr > 0.0)) {
        fail(ErrorCode::InvalidParameter, "hermitian_coeffs: spacings must be positive");
    }
    const double den = hl * hl + 3.0 * hl * hr + hr * hr;
    const double wl = hr / (hl + hr);
    const double wr = hl / (hl + hr);
    HermitianCoefficients c;
    c.d1 = wl * (hl * hl + hl * hr - hr * hr) / den;
    c.d3 = wr * (hr * hr + hl * hr - hl * hl) / den;
    c.e1 = wl * 12.0 / den;
    c.e2 = -12.0 / den;
    c.e3 = wr * 12.0 / den;
    if (hermitian_residual(c, hl, hr) > 1e-10) return hermitian_from_moments(hl, hr);
    return c;
}

CompactOperator::CompactOperator(BandedMatrix lhs, BandedMatrix rhs, Closure closure,
                                 double boundary_spacing, double scaled_strike)
    : lhs_(std::move(lhs)),
      rhs_(std::move(rhs)),
      factor_(lhs_),
      closure_(closure),
      spacing_(boundary_spacing),
      scaled_strike_(scaled_strike) {}

double CompactOperator::boundary_term(double u0, double u2, double w0) const {
    const double h = spacing_;
    if (closure_ == Closure::RobinValue) return 6.0 * scaled_strike_ / h;
    return 75.0 / (h * h * h) * (u2 - u0) - 15.0 / (h * h) * w0;
}

std::vector<double> CompactOperator::solve(std::span<const double> rhs) const {
    if (rhs.size() != size()) fail(ErrorCode::InvalidParameter, "solve: size mismatch");
    std::vector<double> x(rhs.begin(), rhs.end());
    factor_.solve_in_place(x);
    return x;
}

void CompactOperator::second_derivative(std::span<const double> f, double boundary_term,
                                        std::span<double> out, double far_value,
                                        double far_second) const {
    rhs_.multiply(f, out);
    out[0] += boundary_term;
    out[size() - 1] += far_rhs_ * far_value - far_lhs_ * far_second;
    factor_.solve_in_place(out);
}

std::vector<double> CompactOperator::second_derivative(std::span<const double> f,
                                                       double boundary_term) const {
    std::vector<double> out(size());
    second_derivative(f, boundary_term, out);
    return out;
}

CompactOperator assemble_u(const Grid& grid, const ScaledModel& model, GridMode mode) {
    check_mode(grid, mode);
    const std::size_t m = grid.unknowns();
    const double h0 = grid.boundary_spacing();
    const double h02 = h0 * h0;
    BandedMatrix a(m, 1, 3);
    BandedMatrix b(m, 1, 2);

    a.at(0, 0) = 5.0 / 3.0;
    a.at(0, 1) = 2.0 / 3.0;
    a.at(0, 2) = -1.0 / 3.0;
    b.at(0, 0) = -(7.0 + 6.0 * h0) / h02;
    b.at(0, 1) = 8.0 / h02;
    b.at(0, 2) = -1.0 / h02;

    double far_lhs = 0.0;
    double far_rhs = 0.0;
    std::size_t first_interior = 1;
    if (mode == GridMode::Refined) {
        // 14 f''_1 - 5 f''_2 + 4 f''_3 - f''_4 = 12/h_a^2 (f_0 - 2 f_1 + f_2)
        a.at(1, 1) = 14.0;
        a.at(1, 2) = -5.0;
        a.at(1, 3) = 4.0;
        a.at(1, 4) = -1.0;
        b.at(1, 0) = 12.0 / h02;
        b.at(1, 1) = -24.0 / h02;
        b.at(1, 2) = 12.0 / h02;
        first_interior = 2;
    }
    for (std::size_t i = first_interior; i < m; ++i) {
        double d1, d3, e1, e2, e3;
        if (mode == GridMode::Uniform) {
            d1 = d3 = 1.0;
            a.at(i, i) = 10.0;
            e1 = e3 = 12.0 / h02;
            e2 = -24.0 / h02;
        } else {
            const auto c = hermitian_coeffs(grid.spacing(i), grid.spacing(i + 1));
            d1 = c.d1;
            d3 = c.d3;
            a.at(i, i) = 1.0;
            e1 = c.e1;
            e2 = c.e2;
            e3 = c.e3;
        }
        a.at(i, i - 1) = d1;
        b.at(i, i - 1) = e1;
        b.at(i, i) = e2;
        if (i + 1 < m) {
            a.at(i, i + 1) = d3;
            b.at(i, i + 1) = e3;
        } else {
            far_lhs = d3;
            far_rhs = e3;
        }
    }
    check_dominance(a, "value operator");
    CompactOperator op(std::move(a), std::move(b), Closure::RobinValue, h0, model.scaled_strike);
    op.far_lhs_ = far_lhs;
    op.far_rhs_ = far_rhs;
    return op;
}

CompactOperator assemble_w(const Grid& grid, const ScaledModel& model, GridMode mode) {
    check_mode(grid, mode);
    const std::size_t m = grid.unknowns() - 1;  // nodes x_1..x_{M-1}
    const double h0 = grid.boundary_spacing();
    const double h02 = h0 * h0;
    BandedMatrix a(m, 1, 1);
    BandedMatrix b(m, 1, 1);

    // 10 w''_1 = 75/h^3 (u_2 - u_0) - 15/h^2 (w_0 + 8 w_1 + w_2)
    a.at(0, 0) = 10.0;
    b.at(0, 0) = -120.0 / h02;
    b.at(0, 1) = -15.0 / h02;

    double far_lhs = 0.0;
    double far_rhs = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        const std::size_t i = j + 1;  // grid node
        double d1, d3, e1, e2, e3;
        if (mode == GridMode::Uniform) {
            d1 = d3 = 1.0;
            a.at(j, j) = 10.0;
            e1 = e3 = 12.0 / h02;
            e2 = -24.0 / h02;
        } else {
            const auto c = hermitian_coeffs(grid.spacing(i), grid.spacing(i + 1));
            d1 = c.d1;
            d3 = c.d3;
            a.at(j, j) = 1.0;
            e1 = c.e1;
            e2 = c.e2;
            e3 = c.e3;
        }
        a.at(j, j - 1) = d1;
        b.at(j, j - 1) = e1;
        b.at(j, j) = e2;
        if (j + 1 < m) {
            a.at(j, j + 1) = d3;
            b.at(j, j + 1) = e3;
        } else {
            far_lhs = d3;
            far_rhs = e3;
        }
    }
    check_dominance(a, "delta operator");
    CompactOperator op(std::move(a), std::move(b), Closure::CombinedDelta, h0, model.scaled_strike);
    op.far_lhs_ = far_lhs;
    op.far_rhs_ = far_rhs;
    return op;
}

std::vector<double> solve_banded(const CompactOperator& op, std::span<const double> rhs) {
    return op.solve(rhs);
}

SpatialOperators assemble(const Grid& grid, const ScaledModel& model) {
    return {assemble_u(grid, model, grid.mode()), assemble_w(grid, model, grid.mode())};
}

std::vector<double> value_second_derivative(const SolverState& state,
                                            const CompactOperator& op_u) {
    const double b0 = op_u.boundary_term(state.u[0], state.u[2], state.delta_at_boundary());
    return op_u.second_derivative(state.u, b0);
}

std::vector<double> rhs_u(const SolverState& state, std::span<const double> u_xx,
                          const CoefficientField& c, double rate) {
    const std::size_t m = state.u.size();
    std::vector<double> out(m);
    out[0] = c.xi1[0] * u_xx[0] + c.xi2[0] * state.delta_at_boundary() - rate * state.u[0];
    for (std::size_t i = 1; i < m; ++i) {
        out[i] = c.xi1[i] * u_xx[i] + c.xi2[i] * state.w[i - 1] - rate * state.u[i];
    }
    return out;
}

std::vector<double> rhs_w(const SolverState& state, const CompactOperator& op_w,
                          std::span<const double> u_xx, const CoefficientField& c) {
    const double w0 = state.delta_at_boundary();
    const double b0 = op_w.boundary_term(state.u[0], state.u[2], w0);
    auto w_xx = op_w.second_derivative(state.w, b0);
    const std::size_t m = state.w.size();
    std::vector<double> out(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j + 1;
        out[j] = c.xi1[i] * w_xx[j] + c.xi3[i] * u_xx[i] - c.xi4[i] * state.w[j];
    }
    return out;
}

}  // namespace cevfb
