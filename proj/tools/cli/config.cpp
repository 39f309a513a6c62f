#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace cevfb_cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& t) {
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && t.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || t.empty()) {
        throw ConfigError("not a number: '" + t + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& value) {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item)));
    return out;
}

int parse_int(const std::string& value) {
    const double v = parse_number(value);
    if (v != static_cast<double>(static_cast<int>(v))) {
        throw ConfigError("not an integer: '" + value + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

double parse_number(const std::string& token) {
    const std::string t = trim(token);
    const auto slash = t.find('/');
    if (slash == std::string::npos) return parse_plain(t);
    const double num = parse_plain(trim(t.substr(0, slash)));
    const double den = parse_plain(trim(t.substr(slash + 1)));
    if (den == 0.0) throw ConfigError("zero denominator in '" + t + "'");
    return num / den;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c;
    cevfb_model_defaults(&c.model);
    cevfb_scheme_defaults(&c.scheme, CEVFB_SCHEME_DCU);
    cevfb_controller_defaults(&c.controller);
    std::string grid_mode;

    using Setter = std::function<void(const std::string&)>;
    auto num = [](double& field) { return Setter([&field](const std::string& v) { field = parse_number(v); }); };
    const std::map<std::string, Setter> keys = {
        {"strike", [&](const std::string& v) { c.strikes = {parse_number(v)}; }},
        {"strikes", [&](const std::string& v) { c.strikes = parse_list(v); }},
        {"maturity", num(c.model.maturity)},
        {"sigma", num(c.model.sigma)},
        {"rate", num(c.model.rate)},
        {"alpha", num(c.model.alpha)},
        {"spot", num(c.model.spot)},
        {"x_max", num(c.model.x_max)},
        {"scheme",
         [&](const std::string& v) {
             if (v == "dcu") c.scheme.scheme = CEVFB_SCHEME_DCU;
             else if (v == "dcsl") c.scheme.scheme = CEVFB_SCHEME_DCSL;
             else throw ConfigError("scheme must be dcu or dcsl, got '" + v + "'");
         }},
        {"grid",
         [&](const std::string& v) {
             if (v != "uniform" && v != "refined") {
                 throw ConfigError("grid must be uniform or refined, got '" + v + "'");
             }
             grid_mode = v;
         }},
        {"h", num(c.scheme.h)},
        {"refine_ratio", num(c.scheme.refine_ratio)},
        {"fine_intervals", [&](const std::string& v) { c.scheme.fine_intervals = parse_int(v); }},
        {"gamma",
         [&](const std::string& v) {
             const auto g = parse_list(v);
             if (g.size() != 4) throw ConfigError("gamma needs four values");
             for (int i = 0; i < 4; ++i) c.scheme.gamma[i] = g[i];
         }},
        {"epsilon", num(c.controller.tolerance)},
        {"rho", num(c.controller.safety)},
        {"k0", num(c.controller.initial_step)},
        {"min_step", num(c.controller.min_step)},
        {"max_step", num(c.controller.max_step)},
        {"min_factor", num(c.controller.min_factor)},
        {"max_factor", num(c.controller.max_factor)},
        {"output", [&](const std::string& v) { c.output = v; }},
        {"h_list", [&](const std::string& v) { c.h_list = parse_list(v); }},
        {"fixed_step", num(c.fixed_step)},
        {"eps_list", [&](const std::string& v) { c.eps_list = parse_list(v); }},
        {"rho_list", [&](const std::string& v) { c.rho_list = parse_list(v); }},
    };

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            it->second(value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }

    const bool dcu = c.scheme.scheme == CEVFB_SCHEME_DCU;
    if (!grid_mode.empty() && (grid_mode == "uniform") != dcu) {
        throw ConfigError(source + ": grid '" + grid_mode + "' does not match scheme " +
                          (dcu ? "dcu" : "dcsl"));
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace cevfb_cli
