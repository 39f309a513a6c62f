#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "core/freeboundary.hpp"
#include "core/grid.hpp"
#include "core/model.hpp"
#include "core/spatial.hpp"

namespace cevfb {

/// Dormand-Prince 5(4) coefficients. Stage 7 is evaluated at the
/// fifth-order solution (FSAL).
struct Tableau {
    std::array<double, 7> c{};
    std::array<std::array<double, 7>, 7> a{};
    std::array<double, 7> b5{};
    std::array<double, 7> b4{};

    static const Tableau& dormand_prince();
};

/// Semi-discrete system y' = f(y). The first `split()` entries form the
/// value block (error e_u), the rest the delta block (error e_w).
class OdeSystem {
public:
    virtual ~OdeSystem() = default;
    virtual std::size_t size() const = 0;
    virtual std::size_t split() const = 0;
    /// May throw Error(BoundaryEscape); the step is then rejected.
    virtual void evaluate(std::span<const double> y, std::span<double> dydt) = 0;
};

struct StepController {
    double tolerance = 1e-6;
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 5.0;
    double min_step = 1e-12;
    /// Zero means T/10.
    double max_step = 0.0;
    double initial_step = 1e-6;
    int max_min_step_hits = 50;

    /// Throws InvalidParameter.
    void validate() const;
};

struct StepReport {
    bool accepted = false;
    double e_u = 0.0;
    double e_w = 0.0;
    double e = 0.0;
    double k_used = 0.0;
    double k_next = 0.0;
    int stages = 0;
};

struct StepResult {
    std::vector<double> y5;
    std::vector<double> y4;
    /// f(y5), reusable as the first stage of the next step.
    std::vector<double> last_derivative;
    StepReport report;
};

/// One embedded step of size k. `first_derivative`, when given, is f(y).
/// The report's accepted flag is e <= tolerance; k_next is left for the
/// caller.
StepResult dp54_step(OdeSystem& system, std::span<const double> y, double k,
                     const StepController& controller,
                     std::span<const double> first_derivative = {});

/// rho (eps/e)^p k_old with p = 1/4 below tolerance and 1/5 otherwise,
/// limited to [min_factor, max_factor] k_old and then to
/// [min_step, min(max_step, remaining)]. `max_step` must already be resolved.
double next_step(double e, double k_old, const StepController& controller,
                 double remaining);

struct StepLogEntry {
    double tau = 0.0;  // time at the start of the attempt
    double k = 0.0;
    double e_u = 0.0;
    double e_w = 0.0;
    bool accepted = false;
};

using AcceptObserver = std::function<void(double tau, std::span<const double> y, double k)>;

struct AdvanceResult {
    std::vector<double> y;
    double tau = 0.0;
    long accepted = 0;
    long rejected = 0;
    std::vector<StepLogEntry> log;
};

/// Adaptive integration from `tau0` to `horizon`; the last step lands on the
/// horizon exactly. Rejected attempts do not change the state. Throws
/// Stagnation when the step sits at min_step too long.
AdvanceResult advance(OdeSystem& system, std::vector<double> y, double tau0, double horizon,
                      StepController controller, const AcceptObserver& on_accept = {});

/// Fixed steps of size ~k with the fifth-order weights (no error control).
AdvanceResult advance_fixed(OdeSystem& system, std::vector<double> y, double tau0,
                            double horizon, double k, const AcceptObserver& on_accept = {});

/// Per-stage boundary bookkeeping.
struct StageRefresh {
    double boundary = 0.0;
    double delta_at_boundary = 0.0;
    double g = 0.0;
    bool clamped = false;
    CoefficientField coeffs;
};

inline constexpr double kDefaultGMax = 1e6;

/// s_f = E - u_0, w_0 = -s_f, g from the boundary stencil clamped to
/// [-g_max, 0], and the coefficient field. Throws BoundaryEscape when s_f is
/// outside (0, E (1 + 1e-8)].
StageRefresh stage_refresh(std::span<const double> u, const ScaledModel& model,
                           const Grid& grid, const BoundaryStencil& stencil,
                           double g_max = kDefaultGMax);

/// The coupled (u, w) system with y = (u_0..u_{M-1}, w_1..w_{M-1}).
class FreeBoundarySystem : public OdeSystem {
public:
    FreeBoundarySystem(const ScaledModel& model, const Grid& grid,
                       const SpatialOperators& ops, const BoundaryStencil& stencil);

    std::size_t size() const override { return 2 * grid_.unknowns() - 1; }
    std::size_t split() const override { return grid_.unknowns(); }
    void evaluate(std::span<const double> y, std::span<double> dydt) override;

    std::vector<double> pack(const SolverState& state) const;
    SolverState unpack(std::span<const double> y, double tau) const;

    long clamp_events() const { return clamp_events_; }
    long evaluations() const { return evaluations_; }

private:
    const ScaledModel& model_;
    const Grid& grid_;
    const SpatialOperators& ops_;
    const BoundaryStencil& stencil_;
    long clamp_events_ = 0;
    long evaluations_ = 0;
};

}  // namespace cevfb
