#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cevfb/cevfb.h"

namespace cevfb_cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` run description. Lists are comma separated.
struct RunConfig {
    cevfb_model model{};
    std::vector<double> strikes;
    cevfb_scheme_config scheme{};
    cevfb_controller controller{};
    std::string output;

    std::vector<double> h_list;
    double fixed_step = 1e-5;
    std::vector<double> eps_list;
    std::vector<double> rho_list;
};

/// Parses config text. `source` names the input in diagnostics
/// ("file:line: message"). Throws ConfigError.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

/// Accepts decimals and simple ratios such as -1/3.
double parse_number(const std::string& token);

}  // namespace cevfb_cli
