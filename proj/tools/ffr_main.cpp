// Command-line front end: train, eval, sweep-kappa, leakage-audit, export-tasks.
#include "ffr/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Find-Fix-Reason trainer on the synthetic video-QA environment"};
    app.require_subcommand(1);

    std::string config;
    auto* train = app.add_subcommand("train", "Run a training job from a config file");
    train->add_option("--config", config, "INI config path")->required();

    std::string ckpt;
    int n_tasks = 2000;
    std::uint64_t seed = 0;
    int budget = 8;
    bool hidden_only = false, with_patch = false;
    auto* eval = app.add_subcommand("eval", "Greedy accuracy of a checkpoint on generated tasks");
    eval->add_option("--ckpt", ckpt, "Checkpoint path")->required();
    eval->add_option("--tasks", n_tasks, "Number of tasks");
    eval->add_option("--seed", seed, "Task seed");
    eval->add_option("--budget", budget, "Frames observed per task");
    eval->add_flag("--hidden-only", hidden_only, "Only dependency-hidden tasks");
    eval->add_flag("--with-patch", with_patch, "Observe through the oracle patch (diagnostic)");

    std::vector<double> kappas;
    auto* sweep = app.add_subcommand("sweep-kappa", "Train and evaluate once per patch tax");
    sweep->add_option("--config", config, "INI config path")->required();
    sweep->add_option("--kappas", kappas, "Comma-separated kappa values")->required()->delimiter(',');

    long n_failures = 2000;
    bool adversarial = false;
    auto* audit = app.add_subcommand("leakage-audit", "Diagnose failures and check patches for leakage");
    audit->add_option("--config", config, "INI config path")->required();
    audit->add_option("--n", n_failures, "Failures to audit (at least 100)");
    audit->add_flag("--adversarial", adversarial, "Use the answer-stating stub teacher");

    int n_export = 1000;
    std::string dest = "tasks.jsonl";
    auto* exp = app.add_subcommand("export-tasks", "Write generated tasks as JSON lines");
    exp->add_option("--config", config, "INI config path")->required();
    exp->add_option("--n", n_export, "Number of tasks");
    exp->add_option("--out", dest, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) ffr::cli::emit_error(std::cerr, "usage_error", e.what());
        return app.exit(e, std::cout, std::cerr);
    }

    using namespace ffr::cli;
    if (*train) return cmd_train(config, std::cout, std::cerr);
    if (*eval) return cmd_eval(ckpt, n_tasks, seed, budget, hidden_only, with_patch, std::cout, std::cerr);
    if (*sweep) return cmd_sweep_kappa(config, kappas, std::cout, std::cerr);
    if (*audit) return cmd_leakage_audit(config, n_failures, adversarial, std::cout, std::cerr);
    return cmd_export_tasks(config, n_export, dest, std::cout, std::cerr);
}
