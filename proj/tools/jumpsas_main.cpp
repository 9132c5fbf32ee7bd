#include "jumpsas/experiments.hpp"
#include "jumpsas/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

using jumpsas::cli::ExperimentConfig;

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    bool paper_mode = false;
    bool plot_data = false;
    std::string input_csv;
    std::string ranges_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_input) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--seed", flags.seed, "RNG seed override")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_flag("--paper-mode", flags.paper_mode,
                  "pin the reduced dimension from the full-data analysis");
    cmd->add_flag("--plot-data", flags.plot_data,
                  "also write per-replicate series tables");
    if (needs_input) {
        cmd->add_option("--input", flags.input_csv, "input CSV (x1..xP,y)");
        cmd->add_option("--ranges", flags.ranges_path,
                        "JSON parameter ranges for normalization");
    }
}

int dispatch(const std::string& experiment, const CommonFlags& flags) {
    ExperimentConfig config;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) {
            std::cerr << "error: cannot open config '" << flags.config_path
                      << "'\n";
            return 1;
        }
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: config '" << flags.config_path
                      << "': " << e.what() << "\n";
            return 1;
        }
        try {
            config = ExperimentConfig::from_json(doc);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: config '" << flags.config_path
                      << "': " << e.what() << "\n";
            return 1;
        }
    }
    config.experiment = experiment;
    if (flags.seed_set) config.seed = flags.seed;
    if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
    if (flags.paper_mode) config.paper_mode = true;
    if (flags.plot_data) config.plot_data = true;
    if (!flags.input_csv.empty()) config.input_csv = flags.input_csv;
    if (!flags.ranges_path.empty()) config.ranges_path = flags.ranges_path;
    return jumpsas::cli::run_command(std::move(config));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"jumpsas: surrogate active subspaces for functions with "
                 "jump discontinuities"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"fig-divergence", "grid-size sweep of the 1D piecewise-linear "
                           "estimator on a step function"},
        {"fig-crossover", "sample-size sweep of surrogate importances on the "
                          "mixed jump/quadratic 2D function"},
        {"fig-kernels", "kernel study: subspace error across the ridge test "
                        "family"},
        {"analyze", "fit a surrogate to a CSV dataset, report the active "
                    "subspace, run the prediction bake-off"},
        {"verify-theory", "run the numerical checks of the limit theory"}};

    std::vector<std::unique_ptr<CommonFlags>> flag_sets;
    for (const auto& [name, desc] : commands) {
        auto flags = std::make_unique<CommonFlags>();
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, *flags, name == "analyze");
        CommonFlags* raw = flags.get();
        cmd->callback([name, raw]() {
            const int rc = dispatch(name, *raw);
            if (rc != 0) std::exit(rc);
        });
        flag_sets.push_back(std::move(flags));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    return 0;
}
