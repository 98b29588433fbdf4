#include "edcast/cli/commands.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"
#include "edcast/features/matrix.hpp"
#include "edcast/ingest/attendance.hpp"

#include <iostream>

namespace edcast::cli {

namespace {

using nlohmann::json;

std::ostream& out_of(const GlobalOptions& g) { return g.out_stream ? *g.out_stream : std::cout; }
std::ostream& log_of(const GlobalOptions& g) { return g.log_stream ? *g.log_stream : std::cerr; }

void summary(const GlobalOptions& g, const json& j) { out_of(g) << j.dump() << '\n' << std::flush; }

} // namespace

int guarded(const std::string& command, const GlobalOptions& g, const std::function<void(const EventSink&)>& body) {
    auto& log = log_of(g);
    EventSink sink = [&](const json& e) {
        json line = e;
        line["command"] = command;
        log << line.dump() << '\n' << std::flush;
    };
    auto fail = [&](int code, const std::string& kind, const std::string& message) {
        sink({{"event", "error"}, {"kind", kind}, {"message", message}, {"exit", code}});
        return code;
    };
    sink({{"event", "start"}});
    try {
        body(sink);
    } catch (const ConfigError& e) {
        return fail(exit_usage, e.kind(), e.what());
    } catch (const SpecRejected& e) {
        return fail(exit_usage, e.kind(), e.what());
    } catch (const ContractViolation& e) {
        return fail(exit_usage, e.kind(), e.what());
    } catch (const Error& e) {
        return fail(exit_runtime, e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(exit_runtime, "internal", e.what());
    }
    sink({{"event", "done"}, {"exit", 0}});
    return exit_ok;
}

ExperimentConfig effective_config(const GlobalOptions& g) {
    if (!g.config) throw ConfigError("this command needs --config");
    auto c = ExperimentConfig::load(*g.config);
    if (g.seed) c.seed = *g.seed;
    if (g.jobs) {
        if (*g.jobs == 0) throw ConfigError("--jobs must be at least 1");
        c.jobs = *g.jobs;
    }
    if (g.out) c.output_dir = *g.out;
    return c;
}

int cmd_synth(const std::string& spec, std::optional<std::size_t> n_days, bool raw, const GlobalOptions& g) {
    return guarded("synth", g, [&](const EventSink& events) {
        if (!g.out) throw ConfigError("synth needs --out");
        auto s = resolve_spec(json(spec));
        if (g.seed) s.seed = *g.seed;
        if (n_days && *n_days == 0) throw ConfigError("--n-days must be at least 1");
        auto data = synth::generate(s, n_days);
        events({{"event", "generated"}, {"spec", s.name}, {"days", data.series.size()},
                {"clamp_rate", data.truth.clamp_rate}});
        synth::write_dataset(data, s, *g.out, raw);
        summary(g, {{"command", "synth"}, {"output_dir", g.out->string()}, {"days", data.series.size()},
                    {"start", format_date(data.series.start())}, {"seed", s.seed}});
    });
}

int cmd_ingest(const GlobalOptions& g) {
    return guarded("ingest", g, [&](const EventSink& events) {
        auto c = effective_config(g);
        auto d = load_dataset(c);
        events({{"event", "loaded"}, {"days", d.series.size()}, {"imputed", d.imputed.size()}});
        std::filesystem::create_directories(c.output_dir);
        write_file_atomic(c.output_dir / "attendance.csv", ingest::attendance_csv(d.series));
        write_file_atomic(c.output_dir / "covariates.csv", ingest::covariate_csv(d.covariates));
        json imputed = json::array();
        for (auto day : d.imputed) imputed.push_back(format_date(day));
        const auto& f = d.covariates.weather_filled;
        json report{{"schema_version", 1},
                    {"start", format_date(d.series.start())},
                    {"end", format_date(d.series.end())},
                    {"days", d.series.size()},
                    {"imputed_attendance", imputed},
                    {"weather_filled", {{"precip_mm", f.precip}, {"temp_max_c", f.temp_max}, {"temp_min_c", f.temp_min}}}};
        write_file_atomic(c.output_dir / "ingest.json", report.dump(2) + "\n");
        summary(g, {{"command", "ingest"}, {"output_dir", c.output_dir.string()}, {"days", d.series.size()}});
    });
}

int cmd_features(const GlobalOptions& g) {
    return guarded("features", g, [&](const EventSink& events) {
        auto c = effective_config(g);
        auto d = load_dataset(c);
        std::filesystem::create_directories(c.output_dir);
        json files = json::array();
        for (int h : c.horizons) {
            auto m = features::build_matrix(d.series, d.covariates, h);
            const std::string name = "matrix_h" + std::to_string(h) + ".csv";
            write_file_atomic(c.output_dir / name, features::matrix_csv(m));
            events({{"event", "matrix"}, {"horizon", h}, {"rows", m.rows()}, {"cols", m.cols()}});
            files.push_back(name);
        }
        summary(g, {{"command", "features"}, {"output_dir", c.output_dir.string()}, {"files", files}});
    });
}

int cmd_tune(const GlobalOptions& g) {
    return guarded("tune", g, [&](const EventSink& events) {
        auto c = effective_config(g);
        auto d = load_dataset(c);
        auto ctx = make_context(c, d);
        auto ledgers = build_ledgers(c, ctx, events);
        std::filesystem::create_directories(c.output_dir / "ledgers");
        for (const auto& [key, ledger] : ledgers) {
            write_file_atomic(c.output_dir / "ledgers" /
                                  ("ledger_" + key.first + "_h" + std::to_string(key.second) + ".csv"),
                              tuner::ledger_csv(ledger));
        }
        write_file_atomic(c.output_dir / "selections.json", selections_json(c, ctx, ledgers).dump(2) + "\n");
        summary(g, {{"command", "tune"}, {"output_dir", c.output_dir.string()}, {"ledgers", ledgers.size()}});
    });
}

int cmd_backtest(const GlobalOptions& g) {
    return guarded("backtest", g, [&](const EventSink& events) {
        auto c = effective_config(g);
        auto d = load_dataset(c);
        auto res = run_experiment(c, d, events);
        write_experiment(res, c.output_dir);
        for (const auto& w : res.warnings) events({{"event", "warning"}, {"message", w}});
        summary(g, {{"command", "backtest"},
                    {"output_dir", c.output_dir.string()},
                    {"scores", res.scores.size()},
                    {"failures", res.failures.size()}});
    });
}

int cmd_stack(const GlobalOptions& g) {
    return guarded("stack", g, [&](const EventSink& events) {
        if (!g.config) throw ConfigError("stack needs --config");
        auto c = ExperimentConfig::load(*g.config);
        const auto in = c.output_dir;
        const auto out = g.out ? *g.out : in / "restack";
        if (!std::filesystem::exists(in / "results.csv")) {
            throw ConfigError("no backtest output in '" + in.string() + "'; run backtest first");
        }
        auto all = backtest::parse_results_csv(read_file(in / "results.csv"));
        std::vector<backtest::FoldResult> base;
        for (auto& r : all) {
            if (r.model.rfind("stack_", 0) != 0) base.push_back(std::move(r));
        }
        std::vector<StackTrainingSet> training;
        for (int h : c.horizons) {
            const auto path = in / ("stack_train_h" + std::to_string(h) + ".csv");
            if (!std::filesystem::exists(path)) throw ConfigError("missing '" + path.string() + "'");
            training.push_back(StackTrainingSet::parse_csv(read_file(path), h));
        }
        auto st = apply_stacking(training, base, c.stack_variants);
        for (const auto& w : st.warnings) events({{"event", "warning"}, {"message", w}});
        base.insert(base.end(), st.results.begin(), st.results.end());
        std::filesystem::create_directories(out);
        write_file_atomic(out / "stacked_results.csv", backtest::results_csv(st.results));
        write_file_atomic(out / "stack_weights.json", stacks_json(st.fits).dump(2) + "\n");
        auto scores = backtest::scores_json(backtest::score(base), backtest::score_intersection(base), st.failures.size());
        write_file_atomic(out / "scores.json", scores.dump(2) + "\n");
        summary(g, {{"command", "stack"}, {"output_dir", out.string()}, {"stacks", st.fits.size()}});
    });
}

int cmd_importance(const std::string& model, bool identity_permutation, const GlobalOptions& g) {
    return guarded("importance", g, [&](const EventSink& events) {
        if (!backtest::is_ml_model(model)) {
            throw ConfigError("unknown covariate model '" + model + "' (expected lm, glmnet, gbm, rf or knn)");
        }
        auto c = effective_config(g);
        auto d = load_dataset(c);
        auto report = compute_importance(c, d, model, identity_permutation, events);
        std::filesystem::create_directories(c.output_dir);
        const std::string stem = "importance_" + model + "_h" + std::to_string(c.importance.horizon);
        auto j = report.to_json();
        j["model"] = model;
        j["horizon"] = c.importance.horizon;
        write_file_atomic(c.output_dir / (stem + ".json"), j.dump(2) + "\n");
        write_file_atomic(c.output_dir / (stem + ".csv"), report.csv());
        summary(g, {{"command", "importance"}, {"output_dir", c.output_dir.string()}, {"model", model},
                    {"baseline_mae", report.baseline_mae}});
    });
}

} // namespace edcast::cli
