#include "edcast/backtest/engine.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/parallel.hpp"
#include "edcast/core/text.hpp"

#include <cmath>
#include <set>
#include <tuple>

namespace edcast::backtest {

std::vector<std::size_t> block_starts(std::size_t count, std::size_t period) {
    if (period < 1) throw ContractViolation("refit period must be at least 1 day");
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s < count; s += period) starts.push_back(s);
    return starts;
}

std::vector<Prediction> fit_block(const Context& ctx, const Forecaster& f, int horizon, std::size_t first,
                                  std::size_t last, const Selection& selection) {
    const std::size_t h = static_cast<std::size_t>(horizon);
    if (first < h || last < first || last >= ctx.series().size()) {
        throw ContractViolation("invalid block [" + std::to_string(first) + ", " + std::to_string(last) + "]");
    }
    const std::size_t origin = first - h;
    std::vector<Prediction> out;
    out.reserve(last - first + 1);
    std::shared_ptr<const Fitted> fitted;
    std::string fit_error;
    try {
        fitted = f.fit(ctx, horizon, origin, selection.hp,
                       fit_seed(ctx.seed(), f.id(), horizon, origin, selection.candidate));
        if (fitted->origin() != origin || fitted->horizon() != horizon) {
            throw ContractViolation(f.id() + " returned a fit for the wrong origin or horizon");
        }
    } catch (const ContractViolation&) {
        throw;
    } catch (const Error& e) {
        fit_error = e.what();
    }
    for (std::size_t t = first; t <= last; ++t) {
        Prediction p;
        p.target = t;
        if (!fitted) {
            p.error = fit_error;
        } else {
            try {
                p.value = fitted->predict(ctx, t);
                p.ok = std::isfinite(p.value);
                if (!p.ok) p.error = "non-finite prediction";
            } catch (const ContractViolation&) {
                throw;
            } catch (const Error& e) {
                p.error = e.what();
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

BacktestResult run_backtest(const Context& ctx, const std::vector<ModelRun>& models) {
    const Plan& plan = ctx.plan();
    struct Task {
        std::size_t model;
        int horizon;
        std::size_t first, last;
    };
    std::vector<Task> tasks;
    std::set<std::string> seen;
    for (std::size_t m = 0; m < models.size(); ++m) {
        if (!models[m].forecaster) throw ContractViolation("model run without a forecaster");
        if (!seen.insert(models[m].forecaster->id()).second) {
            throw ContractViolation("model '" + models[m].forecaster->id() + "' listed twice");
        }
        for (int h : plan.horizons) {
            for (std::size_t s : block_starts(plan.test_len, models[m].refit_period)) {
                const std::size_t first = plan.test_start() + s;
                const std::size_t last = std::min(first + models[m].refit_period, plan.total_len) - 1;
                tasks.push_back({m, h, first, last});
            }
        }
    }
    std::vector<std::vector<Prediction>> preds(tasks.size());
    std::vector<Selection> selections(tasks.size());
    parallel_for(tasks.size(), ctx.jobs(), [&](std::size_t i) {
        const Task& task = tasks[i];
        const ModelRun& run = models[task.model];
        const std::size_t origin = task.first - static_cast<std::size_t>(task.horizon);
        if (run.selector) {
            selections[i] = run.selector(task.horizon, origin);
        } else {
            selections[i].hp = run.forecaster->grid(ctx, task.horizon).front();
        }
        preds[i] = fit_block(ctx, *run.forecaster, task.horizon, task.first, task.last, selections[i]);
    });

    BacktestResult out;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        const std::string id = models[task.model].forecaster->id();
        ++out.fit_counts[{id, task.horizon}];
        if (selections[i].fallback) {
            out.warnings.push_back(id + " h=" + std::to_string(task.horizon) + " at " +
                                   format_date(ctx.series().date_at(task.first)) +
                                   ": selection fell back to overall_average");
        }
        const std::string hp = selections[i].hp.dump();
        for (const auto& p : preds[i]) {
            const Date d = ctx.series().date_at(p.target);
            if (p.ok) {
                out.results.push_back({d, task.horizon, id, hp, p.value, ctx.series()[p.target]});
            } else {
                out.failures.push_back({d, task.horizon, id, p.error});
            }
        }
    }
    return out;
}

namespace {

using Key = std::pair<int, std::string>;

std::vector<Score> summarize_groups(const std::map<Key, std::pair<std::vector<double>, std::vector<double>>>& groups) {
    std::vector<Score> out;
    for (const auto& [key, ap] : groups) out.push_back({key.second, key.first, summarize(ap.first, ap.second)});
    return out;
}

} // namespace

std::vector<Score> score(const std::vector<FoldResult>& results) {
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : results) {
        auto& g = groups[{r.horizon, r.model}];
        g.first.push_back(r.actual);
        g.second.push_back(r.prediction);
    }
    return summarize_groups(groups);
}

std::vector<Score> score_intersection(const std::vector<FoldResult>& results) {
    std::map<int, std::set<std::string>> models;
    std::map<std::pair<int, Date>, std::size_t> present;
    for (const auto& r : results) {
        models[r.horizon].insert(r.model);
        ++present[{r.horizon, r.target_date}];
    }
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : results) {
        if (present[{r.horizon, r.target_date}] != models[r.horizon].size()) continue;
        auto& g = groups[{r.horizon, r.model}];
        g.first.push_back(r.actual);
        g.second.push_back(r.prediction);
    }
    return summarize_groups(groups);
}

std::string results_csv(const std::vector<FoldResult>& results) {
    std::string out = "date,horizon,model,prediction,actual,hyperparams_json\n";
    for (const auto& r : results) {
        out += format_date(r.target_date) + ',' + std::to_string(r.horizon) + ',' + csv_quote(r.model) + ',' +
               format_roundtrip(r.prediction) + ',' + format_roundtrip(r.actual) + ',' + csv_quote(r.hyperparams) + '\n';
    }
    return out;
}

std::vector<FoldResult> parse_results_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines[0] != "date,horizon,model,prediction,actual,hyperparams_json") {
        throw ParseError("unexpected results header", 1);
    }
    std::vector<FoldResult> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = split_csv_record(lines[i]);
        FoldResult r;
        double h = 0;
        if (f.size() != 6 || !parse_double(f[1], h) || !parse_double(f[3], r.prediction) ||
            !parse_double(f[4], r.actual)) {
            throw ParseError("malformed result row", i + 1);
        }
        if (!try_parse_date(f[0], r.target_date)) throw ParseError("bad date '" + f[0] + "'", i + 1);
        r.horizon = static_cast<int>(h);
        r.model = f[2];
        r.hyperparams = f[5];
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json scores_json(const std::vector<Score>& scores, const std::vector<Score>& intersection,
                           std::size_t failures) {
    auto list = [](const std::vector<Score>& s) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& x : s) {
            a.push_back({{"model", x.model}, {"horizon", x.horizon}, {"mae", x.summary.mae},
                         {"mape", x.summary.mape}, {"n", x.summary.n}});
        }
        return a;
    };
    return {{"schema_version", 1}, {"failures", failures}, {"scores", list(scores)},
            {"intersection", list(intersection)}};
}

} // namespace edcast::backtest
