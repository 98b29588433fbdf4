#include "edcast/cli/experiment.hpp"

#include "edcast/cli/schema.hpp"
#include "edcast/core/errors.hpp"
#include "edcast/core/parallel.hpp"
#include "edcast/core/random.hpp"
#include "edcast/core/text.hpp"
#include "edcast/ingest/attendance.hpp"
#include "edcast/ml/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace edcast::cli {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

[[noreturn]] void schema_failure(const std::string& what, const std::vector<std::string>& errs) {
    std::string msg = what;
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
}

ml::HyperParams hp_from(const json& j, const std::string& model) {
    auto hp = ml::HyperParams::from_json(j);
    try {
        ml::validate(ml::parse_model_kind(model), hp);
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("grid for ") + model + ": " + e.what());
    }
    return hp;
}

void emit(const EventSink& events, json j) {
    if (events) events(j);
}

} // namespace

synth::DgpSpec resolve_spec(const nlohmann::json& spec, const std::filesystem::path& base_dir) {
    json j;
    if (spec.is_string()) {
        const auto name = spec.get<std::string>();
        const auto& names = synth::builtin_names();
        if (std::find(names.begin(), names.end(), name) != names.end()) return synth::builtin_spec(name);
        const auto path = resolve(base_dir, name);
        if (!std::filesystem::exists(path)) {
            throw ConfigError("spec '" + name + "' is neither a bundled spec nor an existing file");
        }
        try {
            j = json::parse(read_file(path));
        } catch (const json::parse_error& e) {
            throw ConfigError("spec file '" + path.string() + "' is not valid JSON: " + e.what());
        }
    } else {
        j = spec;
    }
    auto errs = validate_schema(j, dgp_spec_schema());
    if (!errs.empty()) schema_failure("generator spec does not match the schema:", errs);
    return synth::DgpSpec::from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    auto errs = validate_schema(j, experiment_schema());
    if (!errs.empty()) schema_failure("experiment config does not match the schema:", errs);

    ExperimentConfig c;
    const auto& d = j["data"];
    if (d.contains("synth")) {
        const auto& s = d["synth"];
        SynthSource src;
        auto spec = resolve_spec(s["spec"], base_dir);
        json sj = spec.to_json();
        if (s.contains("overrides")) {
            sj.merge_patch(s["overrides"]);
            auto oerrs = validate_schema(sj, dgp_spec_schema());
            if (!oerrs.empty()) schema_failure("spec overrides do not match the schema:", oerrs);
            synth::DgpSpec::from_json(sj);
        }
        if (s.contains("seed")) sj["seed"] = s["seed"];
        src.spec = sj;
        if (s.contains("n_days")) src.n_days = s["n_days"].get<std::size_t>();
        c.data = src;
    } else if (d.contains("covariates")) {
        c.data = FileSource{resolve(base_dir, d["attendance"]), resolve(base_dir, d["covariates"])};
    } else {
        RawSource src;
        src.attendance = resolve(base_dir, d["attendance"]);
        src.calendar = resolve(base_dir, d["calendar"]);
        src.weather = resolve(base_dir, d["weather"]);
        for (const auto& p : d["trends_daily"]) src.trends_daily.push_back(resolve(base_dir, p));
        src.trends_monthly = resolve(base_dir, d["trends_monthly"]);
        c.data = src;
    }

    if (j.contains("horizons")) {
        c.horizons = j["horizons"].get<std::vector<int>>();
        std::sort(c.horizons.begin(), c.horizons.end());
    }
    c.models = j.contains("models") ? j["models"].get<std::vector<std::string>>() : backtest::model_ids();
    if (j.contains("grids")) {
        for (auto it = j["grids"].begin(); it != j["grids"].end(); ++it) {
            std::vector<ml::HyperParams> grid;
            for (const auto& hp : it.value()) grid.push_back(hp_from(hp, it.key()));
            c.grids[it.key()] = std::move(grid);
        }
    }
    if (j.contains("arima_grid")) {
        std::vector<ts::ArimaOrder> grid;
        for (const auto& o : j["arima_grid"]) {
            grid.push_back({o["p"].get<int>(), o["d"].get<int>(), o["q"].get<int>(), o["P"].get<int>(),
                            o["D"].get<int>(), o["Q"].get<int>()});
        }
        c.arima_grid = grid;
    }
    if (j.contains("tuner")) {
        const auto& t = j["tuner"];
        if (t.contains("policy")) c.policy.kind = tuner::parse_policy_kind(t["policy"]);
        c.policy.n = t.value("n", c.policy.n);
        c.policy.alpha = t.value("alpha", c.policy.alpha);
        c.policy.refit_period = t.value("refit_period", std::size_t{1});
        c.ts_refit_period = t.value("ts_refit_period", c.policy.refit_period);
        c.ledger_refit_period = t.value("ledger_refit_period", c.policy.refit_period);
    }
    if (j.contains("backtest")) {
        const auto& b = j["backtest"];
        if (b.contains("train_len")) c.geometry.train_len = b["train_len"].get<std::size_t>();
        if (b.contains("valid_len")) c.geometry.valid_len = b["valid_len"].get<std::size_t>();
        if (b.contains("test_len")) c.geometry.test_len = b["test_len"].get<std::size_t>();
    }
    if (j.contains("stacking")) {
        const auto& s = j["stacking"];
        c.stacking = s.value("enabled", true);
        if (s.contains("variants")) {
            c.stack_variants.clear();
            for (const auto& v : s["variants"]) c.stack_variants.push_back(ensemble::parse_stack_variant(v));
        }
        if (s.contains("models")) {
            c.stack_models = s["models"].get<std::vector<std::string>>();
            for (const auto& m : c.stack_models) {
                if (std::find(c.models.begin(), c.models.end(), m) == c.models.end()) {
                    throw ConfigError("stacked model '" + m + "' is not in the model set");
                }
            }
        }
    }
    if (j.contains("importance")) {
        const auto& im = j["importance"];
        c.importance.n_repeats = im.value("n_repeats", c.importance.n_repeats);
        c.importance.horizon = im.value("horizon", c.importance.horizon);
        c.importance.decoy = im.value("decoy", false);
        if (im.contains("hyperparams")) {
            for (auto it = im["hyperparams"].begin(); it != im["hyperparams"].end(); ++it) {
                if (!backtest::is_ml_model(it.key())) {
                    throw ConfigError("importance hyperparameters given for non-covariate model '" + it.key() + "'");
                }
                c.importance.hyperparams[it.key()] = hp_from(it.value(), it.key());
            }
        }
    }
    c.seed = j.value("seed", std::uint64_t{0});
    c.jobs = j.contains("jobs") ? j["jobs"].get<unsigned>() : default_jobs();
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"]);
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file '" + path.string() + "' does not exist");
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

backtest::ForecasterOptions ExperimentConfig::forecaster_options(const std::string& model) const {
    backtest::ForecasterOptions o;
    if (auto it = grids.find(model); it != grids.end()) o.grid = it->second;
    if (model == "arima") o.arima_grid = arima_grid;
    return o;
}

std::vector<std::string> ExperimentConfig::stacked_models() const {
    if (!stacking) return {};
    if (!stack_models.empty()) return stack_models;
    std::vector<std::string> out;
    for (const auto& m : models) {
        if (m != "snaive") out.push_back(m);
    }
    return out;
}

Dataset load_dataset(const ExperimentConfig& config) {
    if (const auto* s = std::get_if<SynthSource>(&config.data)) {
        auto data = synth::generate(synth::DgpSpec::from_json(s->spec), s->n_days);
        return {std::move(data.series), std::move(data.covariates), {}};
    }
    std::vector<Date> imputed;
    if (const auto* f = std::get_if<FileSource>(&config.data)) {
        auto series = ingest::load_attendance_csv(f->attendance, &imputed);
        auto cov = ingest::load_covariate_csv(f->covariates);
        const long offset = days_between(cov.start, series.start());
        if (offset < 0 || cov.end() < series.end()) {
            throw CoverageError("covariates cover " + format_date(cov.start) + ".." + format_date(cov.end()) +
                                " but attendance covers " + format_date(series.start()) + ".." +
                                format_date(series.end()));
        }
        auto sliced = cov.slice(static_cast<std::size_t>(offset), series.size());
        return {std::move(series), std::move(sliced), std::move(imputed)};
    }
    const auto& r = std::get<RawSource>(config.data);
    auto series = ingest::load_attendance_csv(r.attendance, &imputed);
    auto calendar = ingest::Calendar::load(r.calendar);
    auto weather = ingest::load_weather_csv(r.weather);
    auto trends = ingest::adjust_trends(ingest::load_trends(r.trends_daily, r.trends_monthly));
    auto cov = ingest::build_covariate_table(series.start(), series.size(), calendar, weather, trends);
    return {std::move(series), std::move(cov), std::move(imputed)};
}

std::string StackTrainingSet::csv() const {
    std::string out = "date,actual";
    for (std::size_t m = 0; m < models.size(); ++m) out += "," + csv_quote(models[m]);
    out += '\n';
    for (std::size_t i = 0; i < dates.size(); ++i) {
        out += format_date(dates[i]) + "," + format_roundtrip(actual[i]);
        for (const auto& p : predictions) out += "," + format_roundtrip(p[i]);
        out += '\n';
    }
    return out;
}

StackTrainingSet StackTrainingSet::parse_csv(std::string_view text, int horizon) {
    auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("stack training file is empty", 1);
    auto header = split_csv_record(lines[0]);
    if (header.size() < 3 || header[0] != "date" || header[1] != "actual") {
        throw ParseError("stack training header must start with date,actual and name at least one model", 1);
    }
    StackTrainingSet s;
    s.horizon = horizon;
    s.models.assign(header.begin() + 2, header.end());
    s.predictions.assign(s.models.size(), {});
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_csv_record(lines[i]);
        if (f.size() != header.size()) throw ParseError("expected " + std::to_string(header.size()) + " fields", i + 1);
        Date date;
        if (!try_parse_date(f[0], date)) throw ParseError("bad date '" + f[0] + "'", i + 1);
        double a = 0.0;
        if (!parse_double(f[1], a)) throw ParseError("bad actual '" + f[1] + "'", i + 1);
        s.dates.push_back(date);
        s.actual.push_back(a);
        for (std::size_t m = 0; m < s.models.size(); ++m) {
            double v = 0.0;
            if (!parse_double(f[m + 2], v)) throw ParseError("bad prediction '" + f[m + 2] + "'", i + 1);
            s.predictions[m].push_back(v);
        }
    }
    return s;
}

StackOutcome apply_stacking(const std::vector<StackTrainingSet>& training,
                            const std::vector<backtest::FoldResult>& base_results,
                            const std::vector<ensemble::StackVariant>& variants) {
    StackOutcome out;
    for (auto variant : variants) {
        const std::string name = "stack_" + ensemble::to_string(variant);
        for (const auto& ts : training) {
            const std::size_t n = ts.dates.size();
            const std::size_t k = ts.models.size();
            if (n < k + 2) {
                out.warnings.push_back(name + " h=" + std::to_string(ts.horizon) + ": only " + std::to_string(n) +
                                       " complete validation rows for " + std::to_string(k) + " models, skipped");
                continue;
            }
            Eigen::MatrixXd P(n, k);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t m = 0; m < k; ++m) P(i, m) = ts.predictions[m][i];
            }
            StackFit fit;
            fit.horizon = ts.horizon;
            fit.train_rows = n;
            try {
                switch (variant) {
                case ensemble::StackVariant::convex: fit.weights = ensemble::fit_stack_convex(P, ts.actual, ts.models); break;
                case ensemble::StackVariant::glm: fit.weights = ensemble::fit_stack_glm(P, ts.actual, ts.models); break;
                case ensemble::StackVariant::penalized:
                    fit.weights = ensemble::fit_stack_penalized(P, ts.actual, ts.models);
                    break;
                }
            } catch (const ContractViolation&) {
                throw;
            } catch (const Error& e) {
                out.warnings.push_back(name + " h=" + std::to_string(ts.horizon) + ": " + e.what());
                continue;
            }
            if (!fit.weights.converged) {
                out.warnings.push_back(name + " h=" + std::to_string(ts.horizon) + ": stopped at gap " +
                                       format_roundtrip(fit.weights.gap));
            }

            std::map<Date, std::pair<double, std::map<std::string, double>>> days;
            std::set<std::string> wanted(ts.models.begin(), ts.models.end());
            for (const auto& r : base_results) {
                if (r.horizon != ts.horizon) continue;
                auto& day = days[r.target_date];
                day.first = r.actual;
                if (wanted.count(r.model)) day.second[r.model] = r.prediction;
            }
            const std::string hp = json{{"variant", ensemble::to_string(variant)}}.dump();
            for (const auto& [date, day] : days) {
                std::string missing;
                for (std::size_t m = 0; m < k; ++m) {
                    if (fit.weights.weights[m] != 0.0 && !day.second.count(ts.models[m])) {
                        missing += (missing.empty() ? "" : ", ") + ts.models[m];
                    }
                }
                if (!missing.empty()) {
                    out.failures.push_back({date, ts.horizon, name, "no base prediction from " + missing});
                    continue;
                }
                out.results.push_back({date, ts.horizon, name, hp, ensemble::predict_stack(fit.weights, day.second),
                                       day.first});
            }
            out.fits.push_back(std::move(fit));
        }
    }
    return out;
}

backtest::Context make_context(const ExperimentConfig& config, const Dataset& data) {
    auto plan = backtest::make_plan(data.series.size(), config.horizons, config.geometry);
    return backtest::Context(data.series, data.covariates, plan, config.seed, config.jobs);
}

LedgerMap build_ledgers(const ExperimentConfig& config, const backtest::Context& ctx, const EventSink& events) {
    LedgerMap out;
    const auto stacked = config.stacked_models();
    for (const auto& m : config.models) {
        auto f = backtest::make_forecaster(m, config.forecaster_options(m));
        const bool in_stack = std::find(stacked.begin(), stacked.end(), m) != stacked.end();
        for (int h : ctx.plan().horizons) {
            const std::size_t candidates = f->grid(ctx, h).size();
            if (candidates < 2 && !in_stack) continue;
            tuner::LedgerOptions opt;
            opt.refit_period = config.ledger_refit_period;
            opt.extend_into_test = candidates > 1 && config.policy.needs_test_errors();
            emit(events, {{"event", "ledger"}, {"model", m}, {"horizon", h}, {"candidates", candidates}});
            out.emplace(std::make_pair(m, h), tuner::build_ledger(ctx, *f, h, opt));
        }
    }
    return out;
}

nlohmann::json selections_json(const ExperimentConfig& config, const backtest::Context& ctx, const LedgerMap& ledgers) {
    json sel = json::array();
    for (const auto& [key, ledger] : ledgers) {
        const std::size_t origin = ctx.plan().test_start() - static_cast<std::size_t>(key.second);
        auto s = tuner::select(ledger, config.policy, ctx.series().date_at(origin + 1));
        sel.push_back({{"model", key.first},
                       {"horizon", key.second},
                       {"as_of", format_date(ctx.series().date_at(origin + 1))},
                       {"candidate", s.candidate},
                       {"hyperparams", s.hp.to_json()},
                       {"fallback", s.fallback}});
    }
    return {{"schema_version", 1}, {"policy", config.policy.to_json()}, {"selections", sel}};
}

namespace {

StackTrainingSet training_set(const ExperimentConfig& config, const backtest::Context& ctx, const LedgerMap& ledgers,
                              int h, const std::vector<std::string>& models) {
    const auto& plan = ctx.plan();
    const std::size_t origin = plan.test_start() - static_cast<std::size_t>(h);
    const Date as_of = ctx.series().date_at(origin + 1);
    const Date cutoff = ctx.series().date_at(origin);
    StackTrainingSet s;
    s.horizon = h;
    s.models = models;
    const auto& first = ledgers.at({models.front(), h});
    std::vector<std::vector<double>> cols;
    for (const auto& m : models) {
        const auto& L = ledgers.at({m, h});
        // tuned ledgers may extend into the test period; the validation slices must agree
        if (L.validation_days != first.validation_days ||
            !std::equal(first.dates.begin(), first.dates.begin() + static_cast<long>(first.validation_days), L.dates.begin())) {
            throw ContractViolation("validation dates differ between models at h=" + std::to_string(h));
        }
        auto sel = tuner::select(L, config.policy, as_of);
        s.candidates.push_back(sel.hp.dump());
        cols.push_back(L.predictions[sel.candidate]);
    }
    s.predictions.assign(models.size(), {});
    for (std::size_t k = 0; k < first.validation_days && first.dates[k] <= cutoff; ++k) {
        bool ok = true;
        for (const auto& c : cols) ok = ok && std::isfinite(c[k]);
        if (!ok) continue;
        s.dates.push_back(first.dates[k]);
        s.actual.push_back(first.actual[k]);
        for (std::size_t m = 0; m < models.size(); ++m) s.predictions[m].push_back(cols[m][k]);
    }
    return s;
}

json plan_json(const backtest::Plan& p) {
    return {{"total_len", p.total_len},
            {"train_len", p.train_len},
            {"valid_len", p.valid_len},
            {"test_len", p.test_len},
            {"horizons", p.horizons}};
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const Dataset& data, const EventSink& events) {
    config.policy.validate();
    auto ctx = make_context(config, data);
    ExperimentResult res;
    res.plan = ctx.plan();
    emit(events, {{"event", "plan"}, {"plan", plan_json(res.plan)}, {"models", config.models}});

    res.ledgers = build_ledgers(config, ctx, events);

    std::vector<backtest::ModelRun> runs;
    for (const auto& m : config.models) {
        auto f = backtest::make_forecaster(m, config.forecaster_options(m));
        std::map<int, tuner::ValidationLedger> by_h;
        for (int h : res.plan.horizons) {
            if (auto it = res.ledgers.find({m, h}); it != res.ledgers.end()) by_h.emplace(h, it->second);
        }
        backtest::ModelRun run;
        if (by_h.size() == res.plan.horizons.size()) {
            run = tuner::make_run(ctx, f, std::move(by_h), config.policy);
        } else {
            run.forecaster = f;
        }
        run.refit_period = backtest::is_ts_model(m) ? config.ts_refit_period : config.policy.refit_period;
        runs.push_back(std::move(run));
    }
    emit(events, {{"event", "backtest"}, {"models", config.models.size()}});
    auto bt = backtest::run_backtest(ctx, runs);
    res.results = std::move(bt.results);
    res.failures = std::move(bt.failures);
    res.fit_counts = std::move(bt.fit_counts);
    res.warnings = std::move(bt.warnings);

    const auto stacked = config.stacked_models();
    if (config.stacking && stacked.size() >= 2) {
        for (int h : res.plan.horizons) res.stack_training.push_back(training_set(config, ctx, res.ledgers, h, stacked));
        emit(events, {{"event", "stack"}, {"models", stacked}});
        auto st = apply_stacking(res.stack_training, res.results, config.stack_variants);
        res.stacks = std::move(st.fits);
        res.results.insert(res.results.end(), st.results.begin(), st.results.end());
        res.failures.insert(res.failures.end(), st.failures.begin(), st.failures.end());
        res.warnings.insert(res.warnings.end(), st.warnings.begin(), st.warnings.end());
    } else if (config.stacking) {
        res.warnings.push_back("stacking needs at least two base models");
    }
    res.scores = backtest::score(res.results);
    res.intersection = backtest::score_intersection(res.results);
    emit(events, {{"event", "scored"}, {"entries", res.scores.size()}, {"failures", res.failures.size()}});
    return res;
}

nlohmann::json scores_report(const ExperimentResult& result) {
    auto j = backtest::scores_json(result.scores, result.intersection, result.failures.size());
    j["plan"] = plan_json(result.plan);
    return j;
}

nlohmann::json stacks_json(const std::vector<StackFit>& fits) {
    json arr = json::array();
    for (const auto& f : fits) {
        auto w = f.weights.to_json();
        w["horizon"] = f.horizon;
        w["train_rows"] = f.train_rows;
        arr.push_back(std::move(w));
    }
    return {{"schema_version", 1}, {"stacks", arr}};
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "ledgers");
    write_file_atomic(dir / "results.csv", backtest::results_csv(result.results));
    write_file_atomic(dir / "scores.json", scores_report(result).dump(2) + "\n");

    json run{{"schema_version", 1}, {"plan", plan_json(result.plan)}};
    json counts = json::array();
    for (const auto& [key, n] : result.fit_counts) counts.push_back({{"model", key.first}, {"horizon", key.second}, {"fits", n}});
    run["fit_counts"] = counts;
    json failures = json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"date", format_date(f.target_date)}, {"horizon", f.horizon}, {"model", f.model},
                            {"message", f.message}});
    }
    run["failures"] = failures;
    run["warnings"] = result.warnings;
    write_file_atomic(dir / "run.json", run.dump(2) + "\n");

    for (const auto& [key, ledger] : result.ledgers) {
        write_file_atomic(dir / "ledgers" / ("ledger_" + key.first + "_h" + std::to_string(key.second) + ".csv"),
                          tuner::ledger_csv(ledger));
    }
    if (!result.stack_training.empty()) {
        for (const auto& ts : result.stack_training) {
            write_file_atomic(dir / ("stack_train_h" + std::to_string(ts.horizon) + ".csv"), ts.csv());
        }
        write_file_atomic(dir / "stack_weights.json", stacks_json(result.stacks).dump(2) + "\n");
    }
}

ensemble::ImportanceReport compute_importance(const ExperimentConfig& config, const Dataset& data,
                                              const std::string& model, bool identity_permutation,
                                              const EventSink& events) {
    if (!backtest::is_ml_model(model)) {
        throw ConfigError("importance needs a covariate model (lm, glmnet, gbm, rf, knn), got '" + model + "'");
    }
    const int h = config.importance.horizon;
    ExperimentConfig cfg = config;
    cfg.horizons = {h};
    auto ctx = make_context(cfg, data);
    const auto& plan = ctx.plan();
    const std::size_t origin = plan.test_start() - static_cast<std::size_t>(h);

    ml::HyperParams hp;
    if (auto it = cfg.importance.hyperparams.find(model); it != cfg.importance.hyperparams.end()) {
        hp = it->second;
    } else {
        auto f = backtest::make_forecaster(model, cfg.forecaster_options(model));
        auto grid = f->grid(ctx, h);
        if (grid.size() == 1) {
            hp = grid.front();
        } else {
            emit(events, {{"event", "ledger"}, {"model", model}, {"horizon", h}, {"candidates", grid.size()}});
            tuner::LedgerOptions opt;
            opt.refit_period = cfg.ledger_refit_period;
            auto ledger = tuner::build_ledger(ctx, *f, h, opt);
            hp = tuner::select(ledger, cfg.policy, ctx.series().date_at(origin + 1)).hp;
        }
    }

    features::ModelMatrix m = ctx.matrix(h);
    if (cfg.importance.decoy) {
        std::mt19937_64 rng(derive_seed(cfg.seed, {hash_name("decoy")}));
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> values(m.rows());
        for (auto& v : values) v = noise(rng);
        m = m.with_column({"decoy", features::FeatureKind::numeric, 0}, std::move(values));
    }
    const std::size_t warmup = features::warmup_days(h);
    auto train = m.slice(plan.window_start(origin), plan.train_len - warmup);
    auto heldout = m.slice(plan.test_start() - warmup, plan.test_len);
    emit(events, {{"event", "importance"}, {"model", model}, {"horizon", h}, {"hyperparams", hp.to_json()}});

    ml::FitOptions fo;
    fo.seed = backtest::fit_seed(cfg.seed, model, h, origin, 0);
    fo.jobs = cfg.jobs;
    auto fitted = ml::fit_model(ml::parse_model_kind(model), train, hp, fo);
    ensemble::ImportanceOptions io;
    io.n_repeats = cfg.importance.n_repeats;
    io.seed = derive_seed(cfg.seed, {hash_name("importance"), hash_name(model)});
    io.jobs = cfg.jobs;
    io.identity_permutation = identity_permutation;
    return ensemble::permutation_importance(*fitted, heldout, io);
}

} // namespace edcast::cli
