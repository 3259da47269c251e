#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "acx/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acx: train a target GNN, extract occlusion ground truth, train the ACGAN explainer, evaluate"};
    app.require_subcommand(1, 1);

    acx::cli::Options opt;
    std::string config, out, scale;
    std::uint64_t seed = 0;
    std::size_t jobs = 0;

    const std::map<std::string, std::string> about{
        {"gen-data", "generate or load the dataset, split it, write data/workload.json"},
        {"train-gnn", "train the target GNN f, write models/target.gnn"},
        {"extract-gt", "occlusion ground-truth masks for every instance, write gt/"},
        {"train-explainer", "train generator and discriminator, write logs/loss_report.csv"},
        {"evaluate", "explain the test split, write reports/metrics.csv and table.txt"},
        {"export-viz", "DOT and GraphML of the evaluated explanations, write viz/"},
        {"report", "render reports/metrics.csv as a table"},
        {"pipeline", "all six steps in order"}};
    for (const auto& name : acx::cli::command_names()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config, "key = value config file");
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--scale", scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
        sub->add_option("--jobs", jobs, "threads for extract-gt and evaluate")->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "run directory (default $ACX_OUT)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->count("--config")) opt.config = config;
    if (sub->count("--out")) opt.out = out;
    if (sub->count("--scale")) opt.scale = scale;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--jobs")) opt.jobs = jobs;

    try {
        acx::cli::run_command(sub->get_name(), opt, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "acx " << sub->get_name() << ": " << e.what() << '\n';
        return acx::cli::exit_code(e);
    }
    return 0;
}
