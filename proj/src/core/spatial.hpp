#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/linalg.hpp"
#include "core/model.hpp"

namespace cevfb {

/// Non-uniform three-point Hermitian relation
///   d1 f''(x-hl) + f''(x) + d3 f''(x+hr) = e1 f(x-hl) + e2 f(x) + e3 f(x+hr),
/// exact for polynomials of degree <= 4.
struct HermitianCoefficients {
    double d1 = 0.0;
    double d3 = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
};

HermitianCoefficients hermitian_coeffs(double h_left, double h_right);

/// Boundary closure of the first row of an operator.
enum class Closure {
    /// Value operator: Robin row built from u'(0) = u(0) - E.
    RobinValue,
    /// Delta operator: combined compact row at x_1 using u_0, u_2 and w_0.
    CombinedDelta,
};

/// A f'' = B f + b, where b is zero except for its first entry. A is
/// factorized once at construction.
class CompactOperator {
public:
    CompactOperator(BandedMatrix lhs, BandedMatrix rhs, Closure closure,
                    double boundary_spacing, double scaled_strike);

    std::size_t size() const { return lhs_.size(); }
    const BandedMatrix& lhs() const { return lhs_; }
    const BandedMatrix& rhs_matrix() const { return rhs_; }
    Closure closure() const { return closure_; }
    double boundary_spacing() const { return spacing_; }

    /// First entry of b: 6E/h for the value operator,
    /// 75/h^3 (u_2 - u_0) - 15/h^2 w_0 for the delta operator.
    double boundary_term(double u0, double u2, double w0) const;

    /// A^{-1} rhs.
    std::vector<double> solve(std::span<const double> rhs) const;

    /// A^{-1}(B f + b). `far_value`/`far_second` are f and f'' at the node
    /// just past the last unknown; the solver uses the zero far field, tests
    /// use them for manufactured solutions.
    void second_derivative(std::span<const double> f, double boundary_term,
                           std::span<double> out, double far_value = 0.0,
                           double far_second = 0.0) const;
    std::vector<double> second_derivative(std::span<const double> f,
                                          double boundary_term) const;

private:
    BandedMatrix lhs_;
    BandedMatrix rhs_;
    BandedLu factor_;
    Closure closure_;
    double spacing_;
    double scaled_strike_;
    // Couplings of the last row to the node past the end.
    double far_lhs_ = 0.0;
    double far_rhs_ = 0.0;

    friend CompactOperator assemble_u(const Grid&, const ScaledModel&, GridMode);
    friend CompactOperator assemble_w(const Grid&, const ScaledModel&, GridMode);
};

/// Value operator over x_0..x_{M-1}. Throws ModeMismatch if `mode` differs
/// from the grid's mode and Singular if a row is not diagonally dominant.
CompactOperator assemble_u(const Grid& grid, const ScaledModel& model, GridMode mode);

/// Delta operator over x_1..x_{M-1}.
CompactOperator assemble_w(const Grid& grid, const ScaledModel& model, GridMode mode);

/// A^{-1} rhs for an assembled operator.
std::vector<double> solve_banded(const CompactOperator& op, std::span<const double> rhs);

struct SpatialOperators {
    CompactOperator u;
    CompactOperator w;
};

SpatialOperators assemble(const Grid& grid, const ScaledModel& model);

/// u_xx on x_0..x_{M-1}; computed once per stage and shared by rhs_u and rhs_w.
std::vector<double> value_second_derivative(const SolverState& state,
                                            const CompactOperator& op_u);

/// u_t = xi1 u_xx + xi2 w_ext - r u with w_ext = (w_0, w_1, ..., w_{M-1}).
std::vector<double> rhs_u(const SolverState& state, std::span<const double> u_xx,
                          const CoefficientField& coeffs, double rate);

/// w_t = xi1 w_xx + xi3 u_xx - xi4 w on x_1..x_{M-1}.
std::vector<double> rhs_w(const SolverState& state, const CompactOperator& op_w,
                          std::span<const double> u_xx, const CoefficientField& coeffs);

}  // namespace cevfb
