#pragma once

#include <span>
#include <vector>

namespace cevfb {

class Grid;

/// Contract and CEV model inputs in market units. `sigma` is the volatility
/// at S = S0: the local volatility is sigma * (S/S0)^alpha.
struct ModelParams {
    double strike = 0.0;
    double maturity = 0.0;
    double sigma = 0.0;
    double rate = 0.0;
    double alpha = 0.0;
    double spot = 0.0;
    double x_max = 3.0;
};

/// Throws InvalidParameter when a positivity or range constraint fails.
void validate(const ModelParams& params);

/// Model expressed in units of S0: strike E = K/S0 and beta = 2 alpha.
struct ScaledModel {
    ModelParams params;
    double scaled_strike = 0.0;
    double beta = 0.0;

    double sigma() const { return params.sigma; }
    double rate() const { return params.rate; }
    double alpha() const { return params.alpha; }
};

ScaledModel scale(const ModelParams& params);

/// Coefficients of the front-fixed value/delta system at one stage:
///   u_t = xi1 u_xx + xi2 w - r u
///   w_t = xi1 w_xx + xi3 u_xx - xi4 w
struct CoefficientField {
    std::vector<double> xi1;
    std::vector<double> xi2;
    std::vector<double> xi3;
    std::vector<double> xi4;
};

/// `boundary_log_derivative` is g = s_f'/s_f. Throws Domain when s_f <= 0.
CoefficientField coefficients(const ScaledModel& model,
                              std::span<const double> x,
                              double boundary,
                              double boundary_log_derivative);

/// Scaled solution on the front-fixed grid. `u` covers x_0..x_{M-1}, `w`
/// covers x_1..x_{M-1}; w_0 = -s_f is implied and u_M = w_M = 0.
struct SolverState {
    double tau = 0.0;
    std::vector<double> u;
    std::vector<double> w;
    double boundary = 0.0;

    double delta_at_boundary() const { return -boundary; }
};

SolverState initial_state(const ScaledModel& model, const Grid& grid);

}  // namespace cevfb
