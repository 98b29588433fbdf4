#include "edcast/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace edcast::cli;
    CLI::App app{"Daily emergency-department attendance forecasting"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config, out;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    auto* config_opt = app.add_option("--config", config, "Experiment config JSON")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "Master seed override");
    auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    auto* out_opt = app.add_option("--out", out, "Output directory override");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    std::string spec;
    std::size_t n_days = 0;
    bool raw = false;
    synth->add_option("spec", spec, "Bundled spec name or spec JSON path")->required();
    auto* n_days_opt = synth->add_option("--n-days", n_days, "Days to generate");
    synth->add_flag("--raw", raw, "Also write the raw ingest inputs under raw/");

    auto* ingest = app.add_subcommand("ingest", "Load, validate and align the configured data");
    auto* features = app.add_subcommand("features", "Export the model matrices");
    auto* tune = app.add_subcommand("tune", "Build validation ledgers and report selections");
    auto* backtest = app.add_subcommand("backtest", "Run the tuned rolling-origin backtest");
    auto* stack = app.add_subcommand("stack", "Refit the stackers from backtest outputs");
    auto* importance = app.add_subcommand("importance", "Permutation importance for a covariate model");
    std::string model;
    bool identity = false;
    importance->add_option("model", model, "lm, glmnet, gbm, rf or knn")->required();
    importance->add_flag("--identity-permutation", identity, "Permute nothing (sanity check)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        nlohmann::json line{{"event", "error"}, {"kind", "usage"}, {"message", e.what()}, {"exit", exit_usage}};
        std::cerr << line.dump() << '\n';
        return exit_usage;
    }

    GlobalOptions g;
    if (*config_opt) g.config = config;
    if (*seed_opt) g.seed = seed;
    if (*jobs_opt) g.jobs = jobs;
    if (*out_opt) g.out = out;

    if (*synth) return cmd_synth(spec, *n_days_opt ? std::optional<std::size_t>(n_days) : std::nullopt, raw, g);
    if (*ingest) return cmd_ingest(g);
    if (*features) return cmd_features(g);
    if (*tune) return cmd_tune(g);
    if (*backtest) return cmd_backtest(g);
    if (*stack) return cmd_stack(g);
    if (*importance) return cmd_importance(model, identity, g);
    return exit_usage;
}
