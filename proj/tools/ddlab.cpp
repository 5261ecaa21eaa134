// ddlab: run one experiment recipe, or aggregate finished runs.
//
//   ddlab <experiment> --config run.cfg --output out/ [--seed N] [--quiet]
//   ddlab report out/a out/b --output summary/

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddl/errors.hpp"
#include "ddl/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"drift-diffusion laboratory"};
    app.require_subcommand(1);

    std::string config_path, output = "out";
    std::uint64_t seed = 1;
    bool quiet = false;
    std::vector<std::string> run_dirs;

    for (const auto& name : ddl::experiment_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--output", output, "output directory");
        sub->add_flag("--quiet", quiet, "suppress progress output");
        if (name == "report") {
            sub->add_option("runs", run_dirs, "run directories holding manifest.json");
            sub->add_option("--config", config_path, "ignored by report");
        } else {
            sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
            sub->add_option("--seed", seed, "seed for randomized sampling");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ddl::exit_validation;
    }

    const std::string experiment = app.get_subcommands().front()->get_name();
    if (experiment == "report") return ddl::report(run_dirs, output, quiet);

    ddl::Config cfg;
    try {
        cfg = ddl::Config::load(config_path);
        if (cfg.has("", "experiment") && cfg.get_string("", "experiment") != experiment)
            throw ddl::ArgumentError("config names experiment '" + cfg.get_string("", "experiment") +
                                     "' but the subcommand is '" + experiment + "'");
        if (cfg.has("", "seed") && !app.get_subcommands().front()->count("--seed"))
            seed = std::uint64_t(cfg.get_int("", "seed"));
        if (cfg.has("", "output_dir") && !app.get_subcommands().front()->count("--output"))
            output = cfg.get_string("", "output_dir");
    } catch (const ddl::ArgumentError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return ddl::exit_validation;
    }
    return ddl::run_experiment(experiment, cfg, {output, seed, quiet});
}
