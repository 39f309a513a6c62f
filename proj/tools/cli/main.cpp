#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace cevfb_cli;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"American put under the CEV model (front-fixing compact scheme)"};
    app.require_subcommand(1);

    std::string config_path, out_path, step_log;
    unsigned threads = 1;
    bool timing = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value run description")->required();
        sub->add_option("--out", out_path, "CSV destination (default: config 'output' or stdout)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    };
    auto* price = app.add_subcommand("price", "value, delta and boundary per strike");
    add_common(price);
    price->add_flag("--timing", timing, "append wall time per strike");
    auto* converge = app.add_subcommand("converge", "fixed-step boundary convergence over h_list");
    add_common(converge);
    auto* sweep = app.add_subcommand("sweep", "value over eps_list / rho_list");
    add_common(sweep);
    auto* boundary = app.add_subcommand("boundary", "boundary curve per accepted step");
    add_common(boundary);
    boundary->add_option("--step-log", step_log, "also write every step attempt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        const RunConfig config = load_config(config_path);
        const CommandOptions options{threads, timing, step_log};

        // Buffer so a failed run leaves no partial file.
        std::ostringstream csv;
        if (price->parsed()) {
            cmd_price(config, options, csv);
        } else if (converge->parsed()) {
            cmd_converge(config, options, csv);
        } else if (sweep->parsed()) {
            cmd_sweep(config, options, csv);
        } else {
            const long up = cmd_boundary(config, options, csv);
            if (up > 0) std::cerr << "note: boundary moved up at " << up << " step(s)\n";
        }

        const std::string dest = out_path.empty() ? config.output : out_path;
        if (dest.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream f(dest, std::ios::binary);
            if (!f) throw ConfigError(dest + ": cannot open for writing");
            f << csv.str();
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}
