#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "core/model.hpp"
#include "core/pricer.hpp"

namespace cevfb {

/// Asset-space grid for the Crank-Nicolson LCP reference solver.
struct LcpGrid {
    /// Zero selects 4 max(K, S0).
    double s_max = 0.0;
    /// Intervals on [0, S0]; S0 is always a node.
    int spot_intervals = 500;
    int time_steps = 2000;
    /// Leading fully implicit steps that damp the payoff kink.
    int implicit_steps = 2;
    double omega = 1.2;
    double tolerance = 1e-9;
    int max_iterations = 10000;
    /// Seed each level with the Brennan-Schwartz solution before the
    /// projected SOR sweeps.
    bool warm_start = true;
};

struct LcpResult {
    double value = 0.0;
    double delta = 0.0;
    std::vector<BoundarySample> boundary;
    long sor_sweeps = 0;
    int max_sweeps_per_level = 0;
    /// Asset grid and values at tau = T.
    std::vector<double> asset;
    std::vector<double> values;
};

/// American put under local volatility sigma (S/S0)^alpha, solved backward
/// in tau with V(0) = K, V(S_max) = 0. Throws NonConvergence when a level
/// hits the sweep cap.
LcpResult cn_psor_price(const ModelParams& params, const LcpGrid& grid = {});

/// Weights w with sum_i w_i x_i^{p_j} = t_j. Throws Singular for
/// degenerate offsets.
std::vector<double> moment_oracle(std::span<const double> offsets,
                                  std::span<const int> powers,
                                  std::span<const double> targets);

/// Same with powers 1..n.
std::vector<double> moment_oracle(std::span<const double> offsets,
                                  std::span<const double> targets);

/// One term weight * d^derivative/dx^derivative f evaluated at x.
struct StencilTerm {
    double x = 0.0;
    int derivative = 0;
    double weight = 0.0;
};

/// A linear identity sum(terms) = 0 expected to hold for low-degree
/// polynomials.
using LinearStencil = std::vector<StencilTerm>;

/// Worst residual of the identity over monomials x^0..x^degree, each scaled
/// by the sum of absolute term contributions.
double polynomial_exactness(const LinearStencil& stencil, int degree);

}  // namespace cevfb
