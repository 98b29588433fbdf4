#include "edcast/backtest/engine.hpp"
#include "edcast/cli/experiment.hpp"
#include "edcast/core/errors.hpp"
#include "edcast/ensemble/stack.hpp"
#include "edcast/ingest/trends.hpp"
#include "edcast/ml/knn.hpp"
#include "edcast/ml/linear.hpp"
#include "edcast/ml/trees.hpp"
#include "edcast/ts/kalman.hpp"
#include "edcast/tuner/tuner.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace edcast;
using features::FeatureKind;
using features::ModelMatrix;
using nlohmann::json;

namespace {

const std::filesystem::path kData = std::filesystem::path(EDCAST_SOURCE_DIR) / "data";

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& note) {
        pass = pass && ok;
        notes.push_back((ok ? "" : "FAILED ") + note);
    }
};

struct Criterion {
    std::string id;
    std::string statement;
    std::function<Verdict()> run;
};

// Runs `body` under a wall-clock budget and folds the timing into the verdict.
void timed(Verdict& v, const std::string& name, double budget_s, const std::function<std::string(bool&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail = body(ok);
    const double secs = seconds_since(t0);
    v.check(ok && secs <= budget_s, name + ": " + detail + " [" + num(secs) + " s <= " + num(budget_s) + " s]");
}

const std::vector<FeatureKind> kMixed = {FeatureKind::numeric, FeatureKind::numeric, FeatureKind::flag,
                                         FeatureKind::categorical, FeatureKind::numeric};

ModelMatrix single_feature(const std::vector<double>& x, const std::vector<double>& y) {
    auto schema = std::make_shared<features::Schema>();
    schema->features.push_back({"x", FeatureKind::numeric, 0});
    std::vector<Date> dates;
    for (std::size_t i = 0; i < x.size(); ++i) dates.push_back(add_days(make_date(2020, 1, 1), static_cast<long>(i)));
    return ModelMatrix(1, schema, dates, y, {x});
}

// ---------------------------------------------------------------- criteria

Verdict reference_numbers() {
    Verdict v;
    v.check(true, "hospital data is private; published table values are documentation targets in README.md, "
                  "not asserted");
    return v;
}

Verdict oracle_suite() {
    Verdict v;
    timed(v, "glmnet(lambda=0) vs normal equations", 30, [](bool& ok) {
        // compares fitted values, which OLS pins down whatever the encoding
        double worst = 0.0;
        int fits = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto mm = fixtures::random_matrix(120, kMixed, seed);
            auto probe = fixtures::random_matrix(40, kMixed, seed + 300);
            auto design = [&](const ModelMatrix& m) {
                std::vector<std::vector<double>> X;
                for (std::size_t c = 0; c < m.cols(); ++c) {
                    const auto& f = m.schema().features[c];
                    if (f.kind != FeatureKind::categorical) {
                        X.push_back(m.column(c));
                        continue;
                    }
                    for (int l = 2; l <= f.levels; ++l) {
                        std::vector<double> col(m.rows());
                        for (std::size_t i = 0; i < m.rows(); ++i) col[i] = static_cast<int>(m.value(i, c)) == l ? 1.0 : 0.0;
                        X.push_back(std::move(col));
                    }
                }
                return X;
            };
            const auto beta = oracles::normal_equations(design(mm), mm.target());
            auto oracle = [&](const ModelMatrix& m) {
                const auto X = design(m);
                std::vector<double> p(m.rows(), beta[0]);
                for (std::size_t j = 0; j < X.size(); ++j)
                    for (std::size_t i = 0; i < m.rows(); ++i) p[i] += beta[j + 1] * X[j][i];
                return p;
            };
            for (double alpha : {0.0, 0.5, 1.0}) {
                auto g = ml::fit_glmnet(mm, 0.0, alpha);
                for (const auto* m : {&mm, &probe}) {
                    const auto got = g.predict(*m);
                    const auto want = oracle(*m);
                    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
                }
                ++fits;
            }
        }
        ok = worst <= 1e-5;
        return std::to_string(fits) + " fits, max abs diff of fitted and probe predictions " + num(worst) + " <= 1e-5";
    });
    timed(v, "univariate lasso vs soft threshold", 30, [](bool& ok) {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> z(0.0, 1.0);
        double worst = 0.0;
        for (int rep = 0; rep < 40; ++rep) {
            std::vector<double> x(60), y(60);
            for (std::size_t i = 0; i < 60; ++i) {
                x[i] = z(rng);
                y[i] = (rep % 2 ? -0.7 : 0.7) * x[i] + z(rng);
            }
            const double mx = std::accumulate(x.begin(), x.end(), 0.0) / 60.0;
            double sx = 0.0;
            for (double e : x) sx += (e - mx) * (e - mx);
            sx = std::sqrt(sx / 60.0);
            for (double& e : x) e = (e - mx) / sx;
            const double lambda = 0.025 * rep;
            auto g = ml::fit_glmnet(single_feature(x, y), lambda, 1.0);
            worst = std::max(worst, std::abs(g.fit().coefficients[0] - oracles::soft_threshold_coefficient(x, y, lambda)));
        }
        ok = worst <= 1e-8;
        return "40 fits, max abs diff " + num(worst) + " <= 1e-8";
    });
    timed(v, "k-NN vs exhaustive distances", 30, [](bool& ok) {
        std::size_t checked = 0, mismatched = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto mm = fixtures::random_matrix(20, kMixed, seed);
            auto probe = fixtures::random_matrix(15, kMixed, seed + 50);
            const int k = 1 + static_cast<int>(seed % 8);
            auto model = ml::fit_knn(mm, {{"k", static_cast<double>(k)}});
            const auto preds = model.predict(probe);
            for (std::size_t q = 0; q < probe.rows(); ++q, ++checked) {
                if (preds[q] != oracles::knn_predict(mm, oracles::raw_row(probe, q), k)) ++mismatched;
            }
        }
        ok = mismatched == 0;
        return std::to_string(checked) + " predictions on 20-row instances, " + std::to_string(mismatched) +
               " differ (exact)";
    });
    timed(v, "CART tree vs exhaustive split search", 30, [](bool& ok) {
        double worst = 0.0;
        std::size_t checked = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto mm = fixtures::random_matrix(30, kMixed, seed, 1.5);
            ml::FitOptions opt;
            opt.bootstrap = false;
            opt.seed = seed;
            auto rf = ml::fit_rf(mm, {{"n_trees", 1}, {"mtry", 5}, {"min_node", 3}}, opt);
            oracles::OracleTree oracle{mm, 3.0};
            std::vector<std::size_t> all(mm.rows());
            std::iota(all.begin(), all.end(), 0);
            auto root = oracle.grow(all);
            auto probe = fixtures::random_matrix(50, kMixed, seed + 100);
            for (const auto* m : {&mm, &probe}) {
                const auto preds = rf.predict(*m);
                for (std::size_t r = 0; r < m->rows(); ++r, ++checked) {
                    worst = std::max(worst, std::abs(preds[r] - oracles::OracleTree::predict(*root, oracles::raw_row(*m, r))));
                }
            }
        }
        ok = worst <= 1e-9;
        return std::to_string(checked) + " predictions on 30-row instances, max abs diff " + num(worst) + " <= 1e-9";
    });
    timed(v, "Kalman filter vs conjugate updates", 30, [](bool& ok) {
        std::mt19937_64 rng(42);
        std::uniform_real_distribution<double> u(0.1, 3.0);
        std::normal_distribution<double> z(0.0, 2.0);
        double worst = 0.0;
        for (int rep = 0; rep < 50; ++rep) {
            const double q = u(rng), r = u(rng), m0 = 10.0 * u(rng), v0 = 5.0 * u(rng);
            std::vector<double> y(5);
            for (double& e : y) e = m0 + z(rng);
            ts::StateSpace ss{Eigen::MatrixXd::Identity(1, 1), Eigen::RowVectorXd::Ones(1),
                              q * Eigen::MatrixXd::Identity(1, 1), r};
            Eigen::VectorXd a0(1);
            a0 << m0;
            Eigen::MatrixXd P0(1, 1);
            P0 << v0;
            ts::KalmanOptions opt;
            opt.store_path = true;
            auto res = ts::kalman_filter(ss, y, a0, P0, opt);
            auto [means, last_var] = oracles::local_level(y, q, r, m0, v0);
            for (std::size_t t = 0; t < y.size(); ++t) worst = std::max(worst, std::abs(res.path[t](0) - means[t]));
            worst = std::max(worst, std::abs(res.filtered_cov(0, 0) - last_var));
        }
        ok = worst <= 1e-8;
        return "50 five-point toys, max abs diff " + num(worst) + " <= 1e-8";
    });
    timed(v, "convex stacker vs 0.001 simplex grid", 30, [](bool& ok) {
        double worst = -HUGE_VAL;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> z(0.0, 1.0);
            const std::vector<double> sds{5.0, 8.0, 12.0};
            Eigen::MatrixXd P(60, 3);
            std::vector<double> y;
            for (Eigen::Index i = 0; i < P.rows(); ++i) {
                y.push_back(200.0 + 15.0 * z(rng));
                const double common = 3.0 * z(rng);
                for (Eigen::Index j = 0; j < 3; ++j) P(i, j) = y.back() + common + sds[static_cast<std::size_t>(j)] * z(rng);
            }
            auto w = ensemble::fit_stack_convex(P, y, {"a", "b", "c"});
            const double got = oracles::stack_sse(P, y, w.weights);
            worst = std::max(worst, got - oracles::simplex_grid_sse(P, y, 1000));
        }
        ok = worst <= 1e-4;
        return "5 instances, max (SSE - grid SSE) " + num(worst) + " <= 1e-4";
    });
    return v;
}

// Small grids keep every model tuned (more than one candidate) on the toy.
cli::ExperimentConfig toy_config() {
    cli::ExperimentConfig c;
    c.data = cli::SynthSource{};
    c.horizons = {1, 3, 7};
    c.models = backtest::model_ids();
    c.grids["knn"] = {{{"k", 3}}, {{"k", 9}}};
    c.grids["glmnet"] = {{{"lambda", 0.5}, {"alpha", 1}}, {{"lambda", 2}, {"alpha", 0.5}}};
    c.grids["gbm"] = {{{"n_trees", 20}, {"depth", 1}, {"learning_rate", 0.1}, {"min_node", 5}},
                      {{"n_trees", 40}, {"depth", 2}, {"learning_rate", 0.1}, {"min_node", 5}}};
    c.grids["rf"] = {{{"n_trees", 30}, {"mtry", 3}, {"min_node", 5}}, {{"n_trees", 30}, {"mtry", 8}, {"min_node", 5}}};
    c.policy.kind = tuner::PolicyKind::ema;
    c.policy.alpha = 0.3;
    c.policy.refit_period = 7;
    c.ts_refit_period = 7;
    c.ledger_refit_period = 5;
    c.geometry = {100, 50, 50};
    c.stacking = true;
    c.stack_variants = {ensemble::StackVariant::convex, ensemble::StackVariant::glm,
                        ensemble::StackVariant::penalized};
    c.seed = 11;
    return c;
}

cli::Dataset toy_data(std::size_t n = 210) {
    const Date start = make_date(2015, 2, 2);
    return {fixtures::weekly_series(start, n, 8), fixtures::covariates(start, n, 9), {}};
}

using Outcomes = std::map<std::tuple<std::string, int, Date>, std::optional<double>>;

Outcomes outcomes(const cli::ExperimentResult& r) {
    Outcomes o;
    for (const auto& f : r.results) o[{f.model, f.horizon, f.target_date}] = f.prediction;
    for (const auto& f : r.failures) o[{f.model, f.horizon, f.target_date}] = std::nullopt;
    return o;
}

Verdict leakage() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto config = toy_config();
    const auto data = toy_data();
    const auto base = cli::run_experiment(config, data);
    const auto before = outcomes(base);
    const std::size_t ts0 = base.plan.test_start();
    std::set<std::string> models;
    std::set<int> horizons;
    for (const auto& [key, _] : before) {
        models.insert(std::get<0>(key));
        horizons.insert(std::get<1>(key));
    }
    v.check(models.size() == 13 && horizons.size() == 3,
            std::to_string(models.size()) + " models (10 base + 3 stacks) x " + std::to_string(horizons.size()) +
                " horizons, " + std::to_string(before.size()) + " predictions per run");

    std::size_t compared = 0, leaked = 0, later_changed = 0, later = 0;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 30.0);
    for (std::size_t m : {ts0 - 1, ts0 + 4, ts0 + 12, ts0 + 27, ts0 + 43}) {
        auto mutated = data;
        std::vector<double> values(data.series.values().begin(), data.series.values().end());
        for (std::size_t i = m + 1; i < values.size(); ++i) values[i] = std::max(0.0, values[i] + 60.0 + z(rng));
        mutated.series = DailySeries(data.series.start(), std::move(values));
        const auto after = outcomes(cli::run_experiment(config, mutated));
        for (const auto& [key, pred] : before) {
            const auto& [model, h, date] = key;
            const long origin = days_between(data.series.start(), date) - h;
            auto it = after.find(key);
            const bool same = it != after.end() && it->second.has_value() == pred.has_value() &&
                              (!pred || *it->second == *pred);
            if (origin <= static_cast<long>(m)) {
                ++compared;
                if (!same) ++leaked;
            } else {
                ++later;
                if (!same) ++later_changed;
            }
        }
    }
    const double secs = seconds_since(t0);
    v.check(leaked == 0, std::to_string(compared) + " predictions with origin <= mutation point compared across 5 "
                                                    "mutations, " +
                             std::to_string(leaked) + " changed (exact)");
    v.check(later_changed * 2 > later, "mutations are visible: " + std::to_string(later_changed) + " of " +
                                           std::to_string(later) + " later-origin predictions changed");
    v.check(secs <= 300, "6 full runs in " + num(secs) + " s <= 300 s");
    return v;
}

tuner::ValidationLedger random_ledger(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 20.0);
    tuner::ValidationLedger L;
    L.model = "knn";
    const std::size_t nc = 2 + rng() % 5, n = 1 + rng() % 60;
    const Date day0 = make_date(2016, 3, 1);
    for (std::size_t c = 0; c < nc; ++c) {
        L.candidates.push_back({{"k", static_cast<double>(3 + 2 * c)}});
        L.simplicity.push_back({static_cast<double>(3 + 2 * c)});
        std::vector<double> e(n);
        // quarter steps make ties common
        for (double& x : e) x = std::round(u(rng) * 4.0) / 4.0;
        L.errors.push_back(e);
        L.predictions.push_back(e);
    }
    for (std::size_t k = 0; k < n; ++k) {
        L.dates.push_back(add_days(day0, static_cast<long>(k)));
        L.actual.push_back(0.0);
    }
    L.validation_days = n;
    return L;
}

tuner::TunerPolicy policy_of(tuner::PolicyKind kind, int n = 7, double alpha = 0.1) {
    tuner::TunerPolicy p;
    p.kind = kind;
    p.n = n;
    p.alpha = alpha;
    return p;
}

Verdict method_structure() {
    Verdict v;
    const std::vector<tuner::PolicyKind> kinds{tuner::PolicyKind::yesterday, tuner::PolicyKind::past_n_days,
                                               tuner::PolicyKind::ema, tuner::PolicyKind::overall_average,
                                               tuner::PolicyKind::default_rule};
    std::vector<tuner::ValidationLedger> real_ledgers;
    {
        auto config = toy_config();
        auto data = toy_data();
        backtest::Context ctx(data.series, data.covariates,
                              backtest::make_plan(data.series.size(), {1, 3, 7}, config.geometry), 21, 1);
        std::size_t compared = 0, differing = 0;
        for (const std::string id : {"lm", "glmnet", "gbm", "rf", "knn"}) {
            auto f = backtest::make_forecaster(id, config.forecaster_options(id));
            std::map<int, tuner::ValidationLedger> ledgers;
            for (int h : ctx.plan().horizons) {
                ledgers[h] = tuner::build_ledger(ctx, *f, h, {1, true});
                real_ledgers.push_back(ledgers[h]);
            }
            for (auto kind : kinds) {
                auto pol = policy_of(kind, 4, 0.3);
                auto online = backtest::run_backtest(ctx, {tuner::make_run(ctx, f, ledgers, pol)});
                auto batch = tuner::run_batch(ctx, *f, ledgers, pol);
                if (online.results.size() != batch.results.size() || online.failures.size() != batch.failures.size()) {
                    ++differing;
                    continue;
                }
                for (std::size_t i = 0; i < batch.results.size(); ++i, ++compared) {
                    const auto& a = online.results[i];
                    const auto& b = batch.results[i];
                    if (a.target_date != b.target_date || a.hyperparams != b.hyperparams || a.prediction != b.prediction) {
                        ++differing;
                    }
                }
            }
        }
        v.check(differing == 0 && compared == 5 * 5 * 150,
                "online refit period 1 vs batch: " + std::to_string(compared) +
                    " predictions (5 ML models x 5 policies x 3 horizons x 50 days), " + std::to_string(differing) +
                    " differ (bit-for-bit)");
    }
    {
        std::mt19937_64 rng(17);
        std::vector<tuner::ValidationLedger> ledgers = real_ledgers;
        for (int i = 0; i < 300; ++i) ledgers.push_back(random_ledger(rng));
        std::size_t checks = 0, ema_bad = 0, past_bad = 0;
        for (const auto& L : ledgers) {
            const auto yesterday = policy_of(tuner::PolicyKind::yesterday);
            const auto ema1 = policy_of(tuner::PolicyKind::ema, 7, 1.0);
            const auto full = policy_of(tuner::PolicyKind::past_n_days, static_cast<int>(L.size()));
            const auto overall = policy_of(tuner::PolicyKind::overall_average);
            for (std::size_t k = 1; k <= L.size(); ++k) {
                const Date as_of = k < L.size() ? L.dates[k] : add_days(L.dates.back(), 1);
                ++checks;
                if (tuner::select(L, yesterday, as_of).candidate != tuner::select(L, ema1, as_of).candidate) ++ema_bad;
                if (tuner::select(L, full, as_of).candidate != tuner::select(L, overall, as_of).candidate) ++past_bad;
            }
        }
        const std::string scope = std::to_string(checks) + " selections over " + std::to_string(real_ledgers.size()) +
                                  " backtest ledgers and 300 random ledgers";
        v.check(ema_bad == 0, "ema(alpha=1) vs yesterday: " + scope + ", " + std::to_string(ema_bad) + " differ");
        v.check(past_bad == 0, "past_n(full) vs overall_average: " + std::to_string(past_bad) + " differ");
    }
    {
        std::size_t steps = 0, rises = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto mm = fixtures::random_matrix(150, kMixed, seed, 2.0);
            const double depth = 1.0 + static_cast<double>(seed % 4);
            auto g = ml::fit_gbm(mm, {{"n_trees", 100}, {"depth", depth}, {"learning_rate", 0.1}, {"min_node", 5}});
            for (std::size_t i = 1; i < g.loss_curve().size(); ++i, ++steps) {
                if (g.loss_curve()[i] > g.loss_curve()[i - 1]) ++rises;
            }
        }
        v.check(rises == 0, "gbm training loss on 20 seeded datasets: " + std::to_string(steps) + " steps, " +
                                std::to_string(rises) + " increases");
    }
    return v;
}

const backtest::Score* score_of(const std::vector<backtest::Score>& scores, const std::string& model, int h) {
    for (const auto& s : scores) {
        if (s.model == model && s.horizon == h) return &s;
    }
    return nullptr;
}

Verdict end_to_end() {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    const auto path = kData / "configs" / "e2e-stmarys.json";
    auto config = cli::ExperimentConfig::load(path);
    const auto spec = cli::resolve_spec(std::get<cli::SynthSource>(config.data).spec, path.parent_path());
    const auto data = cli::load_dataset(config);
    auto values = data.series.values();
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    v.check(std::abs(mean - 208.0) <= 2.0, "series mean " + num(mean) + " within 208 +- 2");
    const auto res = cli::run_experiment(config, data);

    const double floor = spec.noise_sd * std::sqrt(2.0 / M_PI);
    std::string best;
    double best_mae = HUGE_VAL;
    for (const auto& m : backtest::model_ids()) {
        if (m == "snaive") continue;
        const auto* s = score_of(res.scores, m, 1);
        if (s && s->summary.n == res.plan.test_len && s->summary.mae < best_mae) {
            best_mae = s->summary.mae;
            best = m;
        }
    }
    v.check(best_mae >= floor && best_mae <= 1.25 * floor,
            "best single model " + best + " h=1 MAE " + num(best_mae) + " in [" + num(floor) + ", " +
                num(1.25 * floor) + "] (noise floor " + num(spec.noise_sd) + " * sqrt(2/pi))");
    const auto* stack = score_of(res.scores, "stack_convex", 1);
    const double stack_mae = stack ? stack->summary.mae : HUGE_VAL;
    v.check(stack_mae <= 1.02 * best_mae, "stack_convex MAE " + num(stack_mae) + " <= 1.02 * " + num(best_mae) +
                                              " (ratio " + num(stack_mae / best_mae) + ")");
    const auto* naive = score_of(res.scores, "snaive", 1);
    const double naive_mae = naive ? naive->summary.mae : 0.0;
    v.check(best_mae <= 0.9 * naive_mae, "snaive MAE " + num(naive_mae) + ", improvement " +
                                             num(100.0 * (1.0 - best_mae / naive_mae)) + "% >= 10%");
    v.check(res.failures.empty(), std::to_string(res.failures.size()) + " failed predictions");
    v.notes.push_back("runtime " + num(seconds_since(t0)) + " s");
    return v;
}

Verdict importance() {
    Verdict v;
    const auto path = kData / "configs" / "importance-monday.json";
    auto config = cli::ExperimentConfig::load(path);
    const auto data = cli::load_dataset(config);
    for (const std::string model : {"rf", "gbm"}) {
        const auto rep = cli::compute_importance(config, data, model, false);
        std::vector<std::size_t> order(rep.features.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rep.importance[a] > rep.importance[b]; });
        std::string top;
        bool lag_in_top3 = false;
        for (std::size_t r = 0; r < 3 && r < order.size(); ++r) {
            const auto& name = rep.features[order[r]];
            top += (r ? ", " : "") + name;
            lag_in_top3 = lag_in_top3 || name == "rollmean_prev_week" || name == "lag_same_weekday";
        }
        double decoy = HUGE_VAL;
        for (std::size_t i = 0; i < rep.features.size(); ++i) {
            if (rep.features[i] == "decoy") decoy = rep.share[i];
        }
        v.check(lag_in_top3, model + " top 3: " + top);
        v.check(decoy <= 0.02, model + " decoy share " + num(decoy) + " <= 0.02");
    }
    return v;
}

Verdict trends() {
    Verdict v;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    double worst_mean = 0.0, worst_idem = 0.0;
    std::size_t months = 0;
    for (int rep = 0; rep < 100; ++rep) {
        ingest::TrendsFrames f;
        Date start = add_days(make_date(2012, 1, 1), static_cast<long>(rng() % 1500));
        Date end = start;
        const int frames = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < frames; ++k) {
            const std::size_t len = 20 + rng() % 180;
            // each frame starts inside the covered span so the days stay contiguous
            const Date s = k == 0 ? start : add_days(start, static_cast<long>(rng() % (days_between(start, end) + 1)));
            std::vector<double> vals(len);
            for (double& x : vals) x = rng() % 10 == 0 ? 0.0 : u(rng);
            f.daily_frames.push_back({s, vals});
            end = std::max(end, add_days(s, static_cast<long>(len)));
        }
        for (Date d = start; d < end; d = add_days(d, 1)) {
            if (!f.monthly.count(year_month_of(d))) f.monthly[year_month_of(d)] = rng() % 20 == 0 ? 0.0 : u(rng);
        }
        auto a = ingest::adjust_trends(f);
        std::map<YearMonth, std::pair<double, int>> acc;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            auto& e = acc[year_month_of(add_days(a.start, static_cast<long>(i)))];
            e.first += a.values[i];
            e.second += 1;
        }
        for (const auto& [ym, e] : acc) {
            worst_mean = std::max(worst_mean, std::abs(e.first / e.second - f.monthly.at(ym)));
            ++months;
        }
        ingest::TrendsFrames again;
        again.daily_frames.push_back({a.start, a.values});
        again.monthly = f.monthly;
        auto b = ingest::adjust_trends(again);
        if (b.values.size() != a.values.size()) worst_idem = HUGE_VAL;
        for (std::size_t i = 0; i < std::min(a.values.size(), b.values.size()); ++i) {
            worst_idem = std::max(worst_idem, std::abs(a.values[i] - b.values[i]));
        }
    }
    v.check(worst_mean <= 1e-9, "100 fixtures, " + std::to_string(months) + " months, max abs(mean - monthly) " +
                                    num(worst_mean) + " <= 1e-9");
    v.check(worst_idem <= 1e-9, "re-adjusting the output moves no day by more than " + num(worst_idem) + " <= 1e-9");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance checks; one PASS/FAIL line per criterion"};
    std::vector<std::string> only;
    app.add_option("--only", only, "Run just these criterion ids");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {"reference-numbers", "published hospital numbers are documentation only", reference_numbers},
        {"oracle-suite", "models agree with independent oracles, each check within 30 s", oracle_suite},
        {"leakage", "no prediction depends on values after its origin, 210-day toy, within 5 min", leakage},
        {"method-structure", "online/batch, policy identities and gbm loss monotonicity", method_structure},
        {"end-to-end", "stmarys-like full geometry h=1 accuracy bands", end_to_end},
        {"importance", "permutation importance finds the weekly lags and ignores a decoy", importance},
        {"trends", "trends adjustment hits monthly means and is idempotent", trends},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.check(false, std::string("threw: ") + e.what());
        }
        std::ostringstream line;
        line << (v.pass ? "PASS " : "FAIL ") << c.id << " (" << num(seconds_since(t0)) << " s): " << c.statement;
        for (const auto& n : v.notes) line << " | " << n;
        std::cout << line.str() << std::endl;
        if (!v.pass) ++failed;
    }
    return failed ? 1 : 0;
}
