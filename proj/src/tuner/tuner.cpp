#include "edcast/tuner/tuner.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/parallel.hpp"
#include "edcast/core/text.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace edcast::tuner {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::yesterday: return "yesterday";
    case PolicyKind::past_n_days: return "past_n_days";
    case PolicyKind::ema: return "ema";
    case PolicyKind::overall_average: return "overall_average";
    case PolicyKind::default_rule: return "default_rule";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name) {
    for (auto k : {PolicyKind::yesterday, PolicyKind::past_n_days, PolicyKind::ema, PolicyKind::overall_average,
                   PolicyKind::default_rule}) {
        if (to_string(k) == name) return k;
    }
    throw ContractViolation("unknown tuner policy '" + name + "'");
}

void TunerPolicy::validate() const {
    if (n < 1) throw ContractViolation("past_n_days needs n >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ContractViolation("ema alpha must lie in (0, 1]");
    if (refit_period < 1) throw ContractViolation("refit_period must be at least 1 day");
}

bool TunerPolicy::needs_test_errors() const {
    return kind == PolicyKind::yesterday || kind == PolicyKind::past_n_days || kind == PolicyKind::ema;
}

nlohmann::json TunerPolicy::to_json() const {
    return {{"policy", to_string(kind)}, {"n", n}, {"alpha", alpha}, {"refit_period", refit_period}};
}

TunerPolicy TunerPolicy::from_json(const nlohmann::json& j) {
    TunerPolicy p;
    if (j.contains("policy")) p.kind = parse_policy_kind(j.at("policy").get<std::string>());
    if (j.contains("n")) p.n = j.at("n").get<int>();
    if (j.contains("alpha")) p.alpha = j.at("alpha").get<double>();
    if (j.contains("refit_period")) p.refit_period = j.at("refit_period").get<std::size_t>();
    p.validate();
    return p;
}

ValidationLedger build_ledger(const backtest::Context& ctx, const backtest::Forecaster& f, int horizon,
                              const LedgerOptions& options) {
    const auto& plan = ctx.plan();
    ValidationLedger L;
    L.model = f.id();
    L.horizon = horizon;
    L.candidates = f.grid(ctx, horizon);
    for (const auto& c : L.candidates) L.simplicity.push_back(f.simplicity(c));
    const std::size_t first = plan.valid_start();
    const std::size_t last = options.extend_into_test ? plan.total_len - 1 : plan.test_start() - 1;
    L.validation_days = plan.valid_len;
    for (std::size_t t = first; t <= last; ++t) {
        L.dates.push_back(ctx.series().date_at(t));
        L.actual.push_back(ctx.series()[t]);
    }
    const std::size_t n = L.dates.size();
    const auto starts = backtest::block_starts(n, options.refit_period);
    const std::size_t nc = L.candidates.size();
    L.predictions.assign(nc, std::vector<double>(n, kNaN));
    L.errors.assign(nc, std::vector<double>(n, kNaN));
    std::vector<std::vector<backtest::Prediction>> blocks(nc * starts.size());
    parallel_for(blocks.size(), ctx.jobs(), [&](std::size_t i) {
        const std::size_t c = i / starts.size();
        const std::size_t b0 = first + starts[i % starts.size()];
        const std::size_t b1 = std::min(b0 + options.refit_period - 1, last);
        blocks[i] = backtest::fit_block(ctx, f, horizon, b0, b1, {L.candidates[c], c, false});
    });
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::size_t c = i / starts.size();
        for (const auto& p : blocks[i]) {
            const std::size_t k = p.target - first;
            if (p.ok) {
                L.predictions[c][k] = p.value;
                L.errors[c][k] = std::abs(p.value - L.actual[k]);
            } else {
                L.gaps.push_back(format_date(L.dates[k]) + " " + L.candidates[c].dump() + ": " + p.error);
            }
        }
    }
    return L;
}

namespace {

// Candidates compared on a score; NaN scores are ineligible. Returns the
// winning index or nothing when no candidate is eligible.
std::optional<std::size_t> argmin(const ValidationLedger& L, const std::vector<double>& score, bool simplicity) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < score.size(); ++c) {
        if (std::isnan(score[c])) continue;
        if (!best || score[c] < score[*best] ||
            (simplicity && score[c] == score[*best] && L.simplicity[c] < L.simplicity[*best])) {
            best = c;
        }
    }
    return best;
}

std::vector<double> mean_over(const ValidationLedger& L, std::size_t from, std::size_t to) {
    std::vector<double> out(L.candidates.size(), kNaN);
    for (std::size_t c = 0; c < L.candidates.size(); ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t k = from; k < to; ++k) {
            if (std::isnan(L.errors[c][k])) continue;
            sum += L.errors[c][k];
            ++count;
        }
        if (count > 0) out[c] = sum / static_cast<double>(count);
    }
    return out;
}

} // namespace

backtest::Selection select(const ValidationLedger& L, const TunerPolicy& policy, Date as_of) {
    policy.validate();
    if (L.candidates.empty()) throw ContractViolation("ledger for " + L.model + " has no candidates");
    // ledger dates are consecutive; `avail` counts those strictly before as_of
    std::size_t avail = 0;
    if (!L.dates.empty() && as_of > L.dates.front()) {
        avail = std::min<std::size_t>(L.size(), static_cast<std::size_t>(days_between(L.dates.front(), as_of)));
    }
    auto pick = [&](std::size_t c, bool fallback) { return backtest::Selection{L.candidates[c], c, fallback}; };
    if (L.candidates.size() == 1) return pick(0, false);

    std::optional<std::size_t> best;
    const bool window_ok = avail > 0 && days_between(L.dates[avail - 1], as_of) == 1;
    switch (policy.kind) {
    case PolicyKind::yesterday:
        if (window_ok) {
            std::vector<double> last(L.candidates.size());
            for (std::size_t c = 0; c < last.size(); ++c) last[c] = L.errors[c][avail - 1];
            best = argmin(L, last, false);
        }
        break;
    case PolicyKind::past_n_days:
        if (avail > 0) {
            const std::size_t first_day = avail > static_cast<std::size_t>(policy.n) ? avail - policy.n : 0;
            best = argmin(L, mean_over(L, first_day, avail), false);
        }
        break;
    case PolicyKind::ema: {
        std::vector<double> e(L.candidates.size(), kNaN);
        for (std::size_t c = 0; c < e.size(); ++c) {
            for (std::size_t k = 0; k < avail; ++k) {
                const double err = L.errors[c][k];
                if (std::isnan(err)) continue;
                e[c] = std::isnan(e[c]) ? err : policy.alpha * err + (1.0 - policy.alpha) * e[c];
            }
        }
        best = argmin(L, e, false);
        break;
    }
    case PolicyKind::overall_average: best = argmin(L, mean_over(L, 0, avail), false); break;
    case PolicyKind::default_rule:
        best = argmin(L, mean_over(L, 0, std::min(avail, L.validation_days)), true);
        break;
    }
    if (best) return pick(*best, false);
    if (auto fb = argmin(L, mean_over(L, 0, avail), false)) return pick(*fb, true);
    return pick(0, true);
}

std::vector<std::size_t> schedule_refits(const TunerPolicy& policy, std::size_t test_len) {
    policy.validate();
    return backtest::block_starts(test_len, policy.refit_period);
}

backtest::ModelRun make_run(const backtest::Context& ctx, std::shared_ptr<const backtest::Forecaster> f,
                            std::map<int, ValidationLedger> ledgers, const TunerPolicy& policy) {
    policy.validate();
    for (int h : ctx.plan().horizons) {
        if (!ledgers.count(h)) throw ContractViolation("no ledger for " + f->id() + " at horizon " + std::to_string(h));
    }
    const DailySeries* series = &ctx.series();
    auto shared = std::make_shared<const std::map<int, ValidationLedger>>(std::move(ledgers));
    backtest::ModelRun run;
    run.forecaster = std::move(f);
    run.refit_period = policy.refit_period;
    run.selector = [shared, policy, series](int h, std::size_t origin) {
        return select(shared->at(h), policy, series->date_at(origin + 1));
    };
    return run;
}

backtest::BacktestResult run_batch(const backtest::Context& ctx, const backtest::Forecaster& f,
                                   const std::map<int, ValidationLedger>& ledgers, const TunerPolicy& policy) {
    policy.validate();
    const auto& plan = ctx.plan();
    struct Day {
        int h;
        std::size_t t;
        backtest::Selection sel;
        backtest::Prediction pred;
    };
    std::vector<Day> days;
    for (int h : plan.horizons) {
        for (std::size_t t = plan.test_start(); t < plan.total_len; ++t) days.push_back({h, t, {}, {}});
    }
    parallel_for(days.size(), ctx.jobs(), [&](std::size_t i) {
        Day& d = days[i];
        const std::size_t origin = d.t - static_cast<std::size_t>(d.h);
        d.sel = select(ledgers.at(d.h), policy, ctx.series().date_at(origin + 1));
        d.pred = backtest::fit_block(ctx, f, d.h, d.t, d.t, d.sel).front();
    });
    backtest::BacktestResult out;
    for (const auto& d : days) {
        ++out.fit_counts[{f.id(), d.h}];
        const Date date = ctx.series().date_at(d.t);
        if (d.pred.ok) {
            out.results.push_back({date, d.h, f.id(), d.sel.hp.dump(), d.pred.value, ctx.series()[d.t]});
        } else {
            out.failures.push_back({date, d.h, f.id(), d.pred.error});
        }
    }
    return out;
}

std::string ledger_csv(const ValidationLedger& L) {
    std::string out = "date,model,candidate_json,abs_error\n";
    for (std::size_t k = 0; k < L.size(); ++k) {
        for (std::size_t c = 0; c < L.candidates.size(); ++c) {
            out += format_date(L.dates[k]) + ',' + csv_quote(L.model) + ',' + csv_quote(L.candidates[c].dump()) + ',' +
                   (std::isnan(L.errors[c][k]) ? std::string() : format_roundtrip(L.errors[c][k])) + '\n';
        }
    }
    return out;
}

} // namespace edcast::tuner
