#include "edcast/core/errors.hpp"
#include "edcast/tuner/tuner.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace edcast;
using namespace edcast::tuner;

namespace {

const Date kDay0 = make_date(2016, 3, 1);

ValidationLedger hand_ledger(const std::vector<std::vector<double>>& errors, std::size_t validation_days = 0) {
    ValidationLedger L;
    L.model = "knn";
    const std::size_t n = errors.front().size();
    for (std::size_t c = 0; c < errors.size(); ++c) {
        L.candidates.push_back({{"k", static_cast<double>(3 + 2 * c)}});
        L.simplicity.push_back({static_cast<double>(3 + 2 * c)});
        L.errors.push_back(errors[c]);
        L.predictions.push_back(errors[c]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        L.dates.push_back(add_days(kDay0, static_cast<long>(k)));
        L.actual.push_back(0.0);
    }
    L.validation_days = validation_days ? validation_days : n;
    return L;
}

TunerPolicy policy(PolicyKind kind, int n = 7, double alpha = 0.1) {
    TunerPolicy p;
    p.kind = kind;
    p.n = n;
    p.alpha = alpha;
    return p;
}

const std::vector<PolicyKind> kAll = {PolicyKind::yesterday, PolicyKind::past_n_days, PolicyKind::ema,
                                      PolicyKind::overall_average, PolicyKind::default_rule};

backtest::Context toy(std::size_t valid, std::size_t test, std::vector<int> horizons, unsigned jobs = 1) {
    const std::size_t total = backtest::minimum_length(100, valid, test, horizons.back());
    auto plan = backtest::make_plan(total, horizons, {100, valid, test});
    const Date start = make_date(2015, 2, 2);
    return backtest::Context(fixtures::weekly_series(start, total, 8), fixtures::covariates(start, total, 9), plan, 4,
                             jobs);
}

std::shared_ptr<const backtest::Forecaster> knn_with(std::vector<ml::HyperParams> grid) {
    backtest::ForecasterOptions o;
    o.grid = std::move(grid);
    return backtest::make_forecaster("knn", o);
}

} // namespace

TEST_SUITE("tuner") {

TEST_CASE("single candidate under every policy") {
    auto L = hand_ledger({{4, 2, 7}});
    for (auto kind : kAll) {
        auto s = select(L, policy(kind), add_days(kDay0, 3));
        CHECK(s.candidate == 0);
        CHECK_FALSE(s.fallback);
    }
}

TEST_CASE("hand evaluation of the rules") {
    // A errors [1,1,9], B errors [3,3,3]
    auto L = hand_ledger({{1, 1, 9}, {3, 3, 3}});
    const Date end = add_days(kDay0, 3);
    CHECK(select(L, policy(PolicyKind::past_n_days, 1), end).candidate == 1);
    CHECK(select(L, policy(PolicyKind::yesterday), end).candidate == 1);
    CHECK(select(L, policy(PolicyKind::past_n_days, 3), end).candidate == 1);   // 11/3 vs 3
    CHECK(select(L, policy(PolicyKind::overall_average), end).candidate == 1);
    CHECK(select(L, policy(PolicyKind::ema, 7, 0.5), end).candidate == 1);      // A: 1, 1, 5
    CHECK(select(L, policy(PolicyKind::ema, 7, 0.1), end).candidate == 0);      // A: 1, 1, 1.8
    // as of the third day only the first two errors are visible
    const Date mid = add_days(kDay0, 2);
    CHECK(select(L, policy(PolicyKind::yesterday), mid).candidate == 0);
    CHECK(select(L, policy(PolicyKind::past_n_days, 2), mid).candidate == 0);
    CHECK(select(L, policy(PolicyKind::default_rule), mid).candidate == 0);
    CHECK(select(L, policy(PolicyKind::default_rule), end).candidate == 1);
}

TEST_CASE("ties") {
    // equal errors: grid order decides, except the default rule prefers the simpler candidate
    auto L = hand_ledger({{2, 2}, {2, 2}});
    L.simplicity = {{9}, {3}};
    const Date end = add_days(kDay0, 2);
    for (auto kind : {PolicyKind::yesterday, PolicyKind::past_n_days, PolicyKind::ema, PolicyKind::overall_average}) {
        CHECK(select(L, policy(kind), end).candidate == 0);
    }
    CHECK(select(L, policy(PolicyKind::default_rule), end).candidate == 1);
}

TEST_CASE("fallback and failed entries") {
    const double nan = std::nan("");
    auto L = hand_ledger({{5, 5, nan}, {6, 6, 6}});
    // yesterday's entry failed for A, so B is the only eligible candidate
    CHECK(select(L, policy(PolicyKind::yesterday), add_days(kDay0, 3)).candidate == 1);
    // the mean ignores the gap
    CHECK(select(L, policy(PolicyKind::overall_average), add_days(kDay0, 3)).candidate == 0);
    // the day before as_of is not in the ledger
    auto s = select(L, policy(PolicyKind::yesterday), add_days(kDay0, 10));
    CHECK(s.fallback);
    CHECK(s.candidate == 0);
    auto before = select(L, policy(PolicyKind::past_n_days), kDay0);
    CHECK(before.fallback);
    CHECK(before.candidate == 0);
}

TEST_CASE("rule identities on random ledgers") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t nc = 2 + rng() % 5, n = 1 + rng() % 40;
        std::vector<std::vector<double>> e(nc, std::vector<double>(n));
        for (auto& col : e)
            for (auto& x : col) x = std::round(u(rng) * 4.0) / 4.0;
        auto L = hand_ledger(e);
        for (std::size_t k = 1; k <= n + 1; ++k) {
            const Date as_of = add_days(kDay0, static_cast<long>(k));
            auto y = select(L, policy(PolicyKind::yesterday), as_of);
            auto ema1 = select(L, policy(PolicyKind::ema, 7, 1.0), as_of);
            if (k <= n) CHECK(y.candidate == ema1.candidate);
            auto full = select(L, policy(PolicyKind::past_n_days, static_cast<int>(n + 5)), as_of);
            auto overall = select(L, policy(PolicyKind::overall_average), as_of);
            CHECK(full.candidate == overall.candidate);
            // selection never looks at dates on or after as_of
            auto M = L;
            for (auto& col : M.errors)
                for (std::size_t j = std::min(k, n); j < n; ++j) col[j] = u(rng);
            for (auto kind : kAll) CHECK(select(M, policy(kind), as_of).candidate == select(L, policy(kind), as_of).candidate);
        }
    }
}

TEST_CASE("refit schedules") {
    TunerPolicy p;
    p.refit_period = 730;
    CHECK(schedule_refits(p, 730) == std::vector<std::size_t>{0});
    p.refit_period = 365;
    CHECK(schedule_refits(p, 730) == std::vector<std::size_t>{0, 365});
    p.refit_period = 1;
    CHECK(schedule_refits(p, 730).size() == 730);
    for (std::size_t period : {7, 30, 60}) {
        p.refit_period = period;
        CHECK(schedule_refits(p, 730).size() == (730 + period - 1) / period);
    }
    p.refit_period = 0;
    CHECK_THROWS_AS(schedule_refits(p, 730), ContractViolation);
}

TEST_CASE("policy validation and json") {
    CHECK_THROWS_AS(policy(PolicyKind::past_n_days, 0).validate(), ContractViolation);
    CHECK_THROWS_AS(policy(PolicyKind::ema, 7, 0.0).validate(), ContractViolation);
    CHECK_THROWS_AS(policy(PolicyKind::ema, 7, 1.5).validate(), ContractViolation);
    CHECK_NOTHROW(policy(PolicyKind::ema, 7, 1.0).validate());
    CHECK_THROWS_AS(parse_policy_kind("best"), ContractViolation);
    auto p = policy(PolicyKind::ema, 3, 0.25);
    p.refit_period = 30;
    auto q = TunerPolicy::from_json(p.to_json());
    CHECK(q.kind == PolicyKind::ema);
    CHECK(q.n == 3);
    CHECK(q.alpha == 0.25);
    CHECK(q.refit_period == 30);
    CHECK(TunerPolicy::from_json({{"policy", "yesterday"}}).refit_period == 1);
}

TEST_CASE("ledger construction") {
    auto ctx = toy(5, 5, {1});
    auto one = build_ledger(ctx, *knn_with({{{"k", 5}}}), 1);
    CHECK(one.size() == 5);
    CHECK(one.errors[0].size() == 5);
    CHECK(one.gaps.empty());
    for (std::size_t k = 0; k < 5; ++k) {
        const std::size_t t = ctx.plan().valid_start() + k;
        CHECK(one.dates[k] == ctx.series().date_at(t));
        CHECK(one.errors[0][k] == std::abs(one.predictions[0][k] - ctx.series()[t]));
    }
    auto csv = ledger_csv(one);
    CHECK(csv.rfind("date,model,candidate_json,abs_error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

    auto twin = build_ledger(ctx, *knn_with({{{"k", 7}}, {{"k", 7}}}), 1, {3, true});
    CHECK(twin.size() == 10);
    CHECK(twin.validation_days == 5);
    for (std::size_t k = 0; k < twin.size(); ++k) CHECK(twin.errors[0][k] == twin.errors[1][k]);
}

TEST_CASE("online period 1 equals batch") {
    auto ctx = toy(12, 10, {1, 3}, 2);
    backtest::ForecasterOptions gbm_grid;
    gbm_grid.grid = std::vector<ml::HyperParams>{
        {{"n_trees", 10}, {"depth", 1}, {"learning_rate", 0.1}, {"min_node", 5}},
        {{"n_trees", 30}, {"depth", 2}, {"learning_rate", 0.1}, {"min_node", 5}}};
    const std::vector<std::shared_ptr<const backtest::Forecaster>> models{
        knn_with({{{"k", 3}}, {{"k", 9}}, {{"k", 15}}}), backtest::make_forecaster("gbm", gbm_grid),
        backtest::make_forecaster("rf", [] {
            backtest::ForecasterOptions o;
            o.grid = std::vector<ml::HyperParams>{{{"n_trees", 20}, {"mtry", 2}, {"min_node", 5}},
                                                  {{"n_trees", 20}, {"mtry", 6}, {"min_node", 5}}};
            return o;
        }())};
    for (auto kind : kAll) {
        auto pol = policy(kind, 4, 0.3);
        for (const auto& f : models) {
            std::map<int, ValidationLedger> ledgers;
            for (int h : ctx.plan().horizons) ledgers[h] = build_ledger(ctx, *f, h, {1, pol.needs_test_errors()});
            auto online = backtest::run_backtest(ctx, {make_run(ctx, f, ledgers, pol)});
            auto batch = run_batch(ctx, *f, ledgers, pol);
            REQUIRE(online.results.size() == batch.results.size());
            CHECK(online.results.size() == 20);
            for (std::size_t i = 0; i < batch.results.size(); ++i) {
                CHECK(online.results[i].target_date == batch.results[i].target_date);
                CHECK(online.results[i].hyperparams == batch.results[i].hyperparams);
                CHECK(online.results[i].prediction == batch.results[i].prediction);
            }
        }
    }
}

TEST_CASE("fit count per refit period") {
    auto ctx = toy(10, 30, {1});
    auto f = knn_with({{{"k", 3}}, {{"k", 5}}});
    std::map<int, ValidationLedger> ledgers{{1, build_ledger(ctx, *f, 1, {7, true})}};
    for (std::size_t period : {1, 7, 30, 60}) {
        auto pol = policy(PolicyKind::yesterday);
        pol.refit_period = period;
        auto r = backtest::run_backtest(ctx, {make_run(ctx, f, ledgers, pol)});
        CHECK(r.fit_counts.at({"knn", 1}) == (30 + period - 1) / period);
        CHECK(r.results.size() == 30);
        // hyperparameters stay frozen inside a block
        for (std::size_t i = 0; i < r.results.size(); ++i) {
            if (i % period != 0) CHECK(r.results[i].hyperparams == r.results[i - 1].hyperparams);
        }
    }
    CHECK_THROWS_AS(make_run(ctx, f, {}, policy(PolicyKind::yesterday)), ContractViolation);
}

}
