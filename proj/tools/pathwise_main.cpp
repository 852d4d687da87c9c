#include "pathwise/cli/commands.hpp"
#include "pathwise/cli/options.hpp"
#include "pathwise/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using pathwise::cli::RunConfig;

// The config file must be applied before flag parsing so flags override it.
std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return "";
}

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_sink) {
    sub->add_option("--process", cfg.process,
                    "Process spec: gaussian:mu=..,sigma=.. | studentt:mu=..,scale=..,nu=.. | "
                    "ar1:mu=..,sigma=..,phi=.. | die | coin | discrete:values=..|..,probs=..|..");
    sub->add_option("--output", cfg.output, "Output format: csv | json");
    sub->add_option("--out", cfg.out_file, "Write the report to FILE instead of stdout");
    sub->add_flag("--allow-leverage", cfg.allow_leverage, "Permit schedules with a_j > 1");
    sub->add_flag("--rational", cfg.rational, "Print exact fractions where inputs are rational");
    // Consumed by the pre-scan; registered so CLI11 accepts the flag.
    sub->add_option("--config", config_sink, "Flat key=value config file (flags take precedence)");
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    try {
        const std::string config_path = find_config_arg(argc, argv);
        if (!config_path.empty()) pathwise::cli::apply_config_file(config_path, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Pathwise risk/uncertainty statistics for investment horizon and timing"};
    app.require_subcommand(1);
    std::string config_sink; // consumed by the pre-scan

    auto* analytic = app.add_subcommand("analytic", "Closed-form moments and exposure measures");
    analytic->add_option("--schedule", cfg.schedule,
                         "Schedule: lump:t|dca:t|unit:t|last:t|custom:w1,w2,...");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo ensemble estimates");
    simulate->add_option("--schedule", cfg.schedule, "Schedule");
    simulate->add_option("--paths", cfg.paths, "Number of independent paths");
    simulate->add_option("--seed", cfg.seed, "Master seed");
    simulate->add_option("--workers", cfg.workers, "Parallelism hint (result-invariant)");
    simulate->add_option("--dump-paths", cfg.dump_paths_file, "Dump per-path returns to FILE");

    auto* verify = app.add_subcommand("verify", "Monte Carlo / enumeration vs closed forms");
    verify->add_option("--schedule", cfg.schedule, "Schedule");
    verify->add_option("--paths", cfg.paths, "Number of independent paths");
    verify->add_option("--seed", cfg.seed, "Master seed");
    verify->add_option("--workers", cfg.workers, "Parallelism hint (result-invariant)");
    verify->add_option("--z-max", cfg.z_max, "Pass threshold on |z|");
    verify->add_flag("--exact", cfg.exact, "Require the exact enumeration oracle");
    verify->add_option("--dump-paths", cfg.dump_paths_file, "Dump per-path returns to FILE");

    auto* compare = app.add_subcommand("compare", "Schedule comparison table over a horizon range");
    std::string schedules_csv = "lump,dca,unit";
    compare->add_option("--schedules", schedules_csv, "Comma-separated schedule names");
    compare->add_option("--t", cfg.horizon_range, "Horizon range a..b[:step] or single t");

    auto* enumerate = app.add_subcommand("enumerate", "Exact enumeration moments (discrete)");
    enumerate->add_option("--schedule", cfg.schedule, "Schedule");

    for (CLI::App* sub : {analytic, simulate, verify, compare, enumerate}) {
        add_common_options(sub, cfg, config_sink);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (analytic->parsed()) cfg.command = "analytic";
        if (simulate->parsed()) cfg.command = "simulate";
        if (verify->parsed()) cfg.command = "verify";
        if (compare->parsed()) {
            cfg.command = "compare";
            cfg.schedules.clear();
            std::size_t start = 0;
            while (start <= schedules_csv.size()) {
                const auto pos = schedules_csv.find(',', start);
                const auto item = schedules_csv.substr(
                    start, pos == std::string::npos ? std::string::npos : pos - start);
                if (!item.empty()) cfg.schedules.push_back(item);
                if (pos == std::string::npos) break;
                start = pos + 1;
            }
        }
        if (enumerate->parsed()) cfg.command = "enumerate";

        std::ofstream file_out;
        if (!cfg.out_file.empty()) {
            file_out.open(cfg.out_file, std::ios::binary);
            if (!file_out) {
                throw pathwise::validation_error("cannot open output file: " + cfg.out_file);
            }
        }
        std::ostream& out = cfg.out_file.empty() ? std::cout : file_out;
        return pathwise::cli::run_command(cfg, out);
    } catch (const pathwise::validation_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
