#pragma once

#include "edcast/backtest/engine.hpp"

#include <json.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace edcast::tuner {

enum class PolicyKind { yesterday, past_n_days, ema, overall_average, default_rule };

std::string to_string(PolicyKind kind);
/// Throws ContractViolation for unknown names.
PolicyKind parse_policy_kind(const std::string& name);

struct TunerPolicy {
    PolicyKind kind = PolicyKind::default_rule;
    int n = 7;                     // past_n_days window
    double alpha = 0.1;            // ema weight on the newest error
    std::size_t refit_period = 1;  // days between refit boundaries

    /// n >= 1, alpha in (0, 1], refit_period >= 1.
    void validate() const;
    /// Policies that need validation errors refreshed during the test period.
    bool needs_test_errors() const;
    nlohmann::json to_json() const;
    static TunerPolicy from_json(const nlohmann::json& j);
};

/// Out-of-sample predictions and absolute errors of every grid candidate on
/// consecutive target dates. The first `validation_days` dates form the
/// validation slice; any later dates extend into the test period.
struct ValidationLedger {
    std::string model;
    int horizon = 1;
    std::vector<ml::HyperParams> candidates;
    std::vector<std::vector<double>> simplicity;  // per candidate
    std::vector<Date> dates;
    std::vector<double> actual;
    std::size_t validation_days = 0;
    std::vector<std::vector<double>> predictions;  // [candidate][date], NaN when the fit failed
    std::vector<std::vector<double>> errors;       // [candidate][date], NaN when the fit failed
    std::vector<std::string> gaps;                 // one note per failed candidate-date

    std::size_t size() const { return dates.size(); }
};

struct LedgerOptions {
    std::size_t refit_period = 1;
    bool extend_into_test = false;
};

/// Evaluates every candidate of `f.grid(ctx, horizon)` on the validation
/// slice (and the test slice when extended) with the backtest's rolling
/// window, refitting every `refit_period` days.
ValidationLedger build_ledger(const backtest::Context& ctx, const backtest::Forecaster& f, int horizon,
                              const LedgerOptions& options = {});

/// Chooses a candidate from ledger dates strictly before `as_of`.
backtest::Selection select(const ValidationLedger& ledger, const TunerPolicy& policy, Date as_of);

/// Offsets of refit boundaries within a test slice of `test_len` days.
std::vector<std::size_t> schedule_refits(const TunerPolicy& policy, std::size_t test_len);

/// Online method: a model run that, at each refit boundary with origin o,
/// selects from `ledgers[h]` as of the day after o.
backtest::ModelRun make_run(const backtest::Context& ctx, std::shared_ptr<const backtest::Forecaster> f,
                            std::map<int, ValidationLedger> ledgers, const TunerPolicy& policy);

/// Batch method: select and refit for every test day independently.
backtest::BacktestResult run_batch(const backtest::Context& ctx, const backtest::Forecaster& f,
                                   const std::map<int, ValidationLedger>& ledgers, const TunerPolicy& policy);

/// CSV `date,model,candidate_json,abs_error`; failed entries have an empty error.
std::string ledger_csv(const ValidationLedger& ledger);

} // namespace edcast::tuner
