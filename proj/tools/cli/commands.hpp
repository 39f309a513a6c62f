#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "config.hpp"

namespace cevfb_cli {

/// A solver call failed; maps to exit code 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommandOptions {
    unsigned threads = 1;
    bool timing = false;
    std::string step_log;  // boundary only
};

/// strike,scaled_value,value,delta,boundary,accepted,rejected[,wall_seconds]
void cmd_price(const RunConfig& config, const CommandOptions& options, std::ostream& out);

/// Fixed-step runs over h_list (first strike) with successive boundary
/// differences at tau = T, the max over shared tau levels, and observed
/// orders.
void cmd_converge(const RunConfig& config, const CommandOptions& options, std::ostream& out);

/// Value per (setting, strike) over eps_list and rho_list.
void cmd_sweep(const RunConfig& config, const CommandOptions& options, std::ostream& out);

/// tau,boundary,k per accepted step for each strike. Returns the number of
/// steps where the boundary moved up.
long cmd_boundary(const RunConfig& config, const CommandOptions& options, std::ostream& out);

}  // namespace cevfb_cli
