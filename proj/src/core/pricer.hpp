#pragma once

#include <array>
#include <vector>

#include "core/freeboundary.hpp"
#include "core/grid.hpp"
#include "core/integrator.hpp"
#include "core/model.hpp"

namespace cevfb {

/// dcu: uniform grid. dcsl: locally refined grid near the boundary with the
/// staggered boundary estimator.
enum class Scheme { Dcu, Dcsl };

struct SchemeConfig {
    Scheme scheme = Scheme::Dcu;
    double h = 0.1;
    double refine_ratio = 0.25;
    int fine_intervals = 8;
    /// Empty (all zero) selects the scheme default: (1,2,3,4) for dcu and
    /// (0.5,1,1.5,2) for dcsl.
    std::array<double, 4> gamma{};
};

GridSpec grid_spec(const SchemeConfig& scheme, double x_max);

/// dcsl always uses the staggered estimator; dcu uses the uniform one unless
/// a non-default gamma was requested.
EstimatorKind estimator_for(const SchemeConfig& scheme, const GridSpec& spec);

struct BoundarySample {
    double tau = 0.0;
    double boundary = 0.0;  // market units
};

struct Readout {
    double value = 0.0;  // market units
    double delta = 0.0;
};

/// Value and delta at S = S0 from a final state: five-point interpolation at
/// x* = -ln s_f. Intrinsic value and delta -1 when S0 is in the exercise
/// region.
Readout readout(const SolverState& state, const ScaledModel& model, const Grid& grid);

struct RunOptions {
    bool record_history = false;
    bool record_steps = false;
};

struct PricingResult {
    double value = 0.0;
    double delta = 0.0;
    double boundary = 0.0;  // s_f(T) * S0
    long accepted = 0;
    long rejected = 0;
    long clamp_events = 0;
    long evaluations = 0;
    double wall_seconds = 0.0;
    SolverState final_state;
    std::vector<BoundarySample> history;
    std::vector<StepLogEntry> steps;
};

/// Owns the model, grid, operators and boundary stencil for one contract.
class Pricer {
public:
    Pricer(const ModelParams& params, const SchemeConfig& scheme);

    PricingResult run(const StepController& controller, const RunOptions& options = {}) const;
    PricingResult run_fixed(double k, const RunOptions& options = {}) const;

    const ScaledModel& model() const { return model_; }
    const Grid& grid() const { return grid_; }
    const GridSpec& spec() const { return spec_; }
    const BoundaryStencil& stencil() const { return stencil_; }
    const SpatialOperators& operators() const { return ops_; }

private:
    template <class Advance>
    PricingResult execute(const RunOptions& options, Advance&& advance_fn) const;

    ScaledModel model_;
    GridSpec spec_;
    Grid grid_;
    SpatialOperators ops_;
    BoundaryStencil stencil_;
};

/// Convenience wrapper: build and run with the given controller.
PricingResult price(const ModelParams& params, const SchemeConfig& scheme,
                    const StepController& controller = {}, const RunOptions& options = {});

}  // namespace cevfb
