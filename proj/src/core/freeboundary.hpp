#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/model.hpp"

namespace cevfb {

/// Q_i = sqrt(max(u_i - E + e^{x_i} s_f, 0)) at the requested nodes.
struct SqrtProfile {
    std::vector<double> q;
};

SqrtProfile q_profile(std::span<const double> u, double boundary,
                      std::span<const std::size_t> nodes,
                      const ScaledModel& model, const Grid& grid);

/// Q'(x_0) = sqrt(rE) / (sigma s_f^{beta/2}).
double q_prime_x0(const ScaledModel& model, double boundary);

/// Q''(x_0) with xi_2(x_0) = r - sigma^2 s_f^beta / 2 + g.
double q_second_x0(const ScaledModel& model, double boundary, double g);

/// Five-point extrapolated row at offsets 0, 1, 2, 3, 4 (times x-bar):
/// sum w_i Q(i x-bar) = 25/6 x-bar Q'(0) + x-bar^2 Q''(0) + O(x-bar^6).
std::array<double, 5> uniform_weights();

/// Weights of the staggered relation
///   sum_{i=0..4} b_i Q(h_i) = c_0 Q'(0) + d_0 Q''(0),  h_0 = 0, h_i = gamma_i h.
struct StaggeredWeights {
    std::array<double, 5> b{};
    double c0 = 0.0;
    double d0 = 0.0;
    /// a_3 .. a_8 of the closed-form elimination chain.
    std::array<double, 6> a{};
    /// True when the closed form missed the moment conditions and the
    /// weights come from the direct moment solve.
    bool from_moment_solve = false;
};

/// Throws InvalidParameter unless 0 < gamma_1 < ... < gamma_4.
StaggeredWeights staggered_weights(double h, const std::array<double, 4>& gamma);

enum class EstimatorKind { Uniform, Staggered };

/// Linear functional sum_i node_weights[i] Q(x_{nodes[i]}) matched against
/// slope_weight Q'(0) + curvature_weight Q''(0).
struct BoundaryStencil {
    EstimatorKind kind = EstimatorKind::Uniform;
    std::array<std::size_t, 4> nodes{};
    std::array<double, 4> node_weights{};
    double slope_weight = 0.0;
    double curvature_weight = 0.0;
};

/// Lemma-1 style stencil with x-bar = first interval of the grid.
BoundaryStencil uniform_stencil(const Grid& grid);
BoundaryStencil staggered_stencil(const Grid& grid, const GridSpec& spec);

/// g = s_f'/s_f and the four components (denominator, curvature term, slope
/// term, sample term), i.e. M1..M4 for the uniform stencil and M5..M8 for
/// the staggered one: g = (m[1] - m[2] + m[3]) / m[0].
struct BoundaryDerivative {
    double g = 0.0;
    std::array<double, 4> m{};
    EstimatorKind kind = EstimatorKind::Uniform;
};

/// `profile.q` must be sampled at `stencil.nodes`. Throws Domain when
/// s_f <= 0 or r E = 0.
BoundaryDerivative boundary_derivative(const SqrtProfile& profile,
                                       const BoundaryStencil& stencil,
                                       const ScaledModel& model, double boundary);

}  // namespace cevfb
