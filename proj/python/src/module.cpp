#include "edcast/cli/experiment.hpp"
#include "edcast/cli/schema.hpp"
#include "edcast/core/errors.hpp"
#include "edcast/core/metrics.hpp"
#include "edcast/ingest/trends.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using nlohmann::json;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

template <class T>
py::array_t<double> to_array_of(const std::vector<T>& v) {
    return to_array(std::vector<double>(v.begin(), v.end()));
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return std::vector<double>(a.data(), a.data() + a.size());
}

py::dict covariates_dict(const edcast::ingest::CovariateTable& c) {
    py::dict d;
    d["bank_holiday"] = to_array_of(c.bank_holiday);
    d["school_holiday"] = to_array_of(c.school_holiday);
    d["precip_mm"] = to_array(c.precip_mm);
    d["temp_max_c"] = to_array(c.temp_max_c);
    d["temp_min_c"] = to_array(c.temp_min_c);
    d["flu_searches"] = to_array(c.flu_searches);
    for (std::size_t e = 0; e < c.event_names.size(); ++e) d[py::str("event:" + c.event_names[e])] = to_array_of(c.events[e]);
    return d;
}

py::dict generate(const std::string& spec_json, std::optional<std::size_t> n_days) {
    auto spec = edcast::cli::resolve_spec(json::parse(spec_json));
    auto data = edcast::synth::generate(spec, n_days);
    std::vector<std::string> dates;
    for (std::size_t i = 0; i < data.series.size(); ++i) dates.push_back(edcast::format_date(data.series.date_at(i)));
    const auto& g = data.truth;
    py::dict comps;
    comps["base"] = to_array(g.base);
    comps["trend"] = to_array(g.trend);
    comps["weekly"] = to_array(g.weekly);
    comps["yearly"] = to_array(g.yearly);
    comps["holiday"] = to_array(g.holiday);
    comps["event"] = to_array(g.event);
    comps["flu"] = to_array(g.flu);
    comps["weather"] = to_array(g.weather);
    comps["noise"] = to_array(g.noise);
    comps["pre_clamp"] = to_array(g.pre_clamp);
    auto values = data.series.values();
    py::dict out;
    out["dates"] = dates;
    out["values"] = to_array(std::vector<double>(values.begin(), values.end()));
    out["components"] = comps;
    out["covariates"] = covariates_dict(data.covariates);
    out["clamp_rate"] = g.clamp_rate;
    out["spec_json"] = spec.to_json().dump();
    return out;
}

py::dict run_experiment(const std::string& config_json, const std::string& base_dir) {
    auto config = edcast::cli::ExperimentConfig::from_json(json::parse(config_json), base_dir);
    auto data = edcast::cli::load_dataset(config);
    edcast::cli::ExperimentResult res;
    {
        py::gil_scoped_release release;
        res = edcast::cli::run_experiment(config, data);
    }
    std::vector<std::string> dates, models;
    std::vector<int> horizons;
    std::vector<double> preds, actual;
    for (const auto& r : res.results) {
        dates.push_back(edcast::format_date(r.target_date));
        models.push_back(r.model);
        horizons.push_back(r.horizon);
        preds.push_back(r.prediction);
        actual.push_back(r.actual);
    }
    py::dict results;
    results["date"] = dates;
    results["horizon"] = horizons;
    results["model"] = models;
    results["prediction"] = to_array(preds);
    results["actual"] = to_array(actual);
    py::dict out;
    out["results"] = results;
    out["scores_json"] = edcast::cli::scores_report(res).dump();
    out["stacks_json"] = edcast::cli::stacks_json(res.stacks).dump();
    out["warnings"] = res.warnings;
    out["failures"] = res.failures.size();
    return out;
}

py::tuple adjust_trends(const std::vector<std::pair<std::string, std::vector<double>>>& frames,
                        const std::map<std::string, double>& monthly) {
    edcast::ingest::TrendsFrames tf;
    for (const auto& [start, values] : frames) tf.daily_frames.push_back({edcast::parse_date(start), values});
    for (const auto& [month, value] : monthly) {
        tf.monthly[edcast::parse_year_month(month)] = value;
    }
    auto adj = edcast::ingest::adjust_trends(tf);
    return py::make_tuple(edcast::format_date(adj.start), to_array(adj.values));
}

std::string fit_stack(const std::string& variant, const py::array_t<double, py::array::c_style | py::array::forcecast>& preds,
                      const py::array_t<double, py::array::c_style | py::array::forcecast>& actual,
                      const std::vector<std::string>& names) {
    if (preds.ndim() != 2) throw std::invalid_argument("predictions must be a two-dimensional array");
    const auto n = static_cast<Eigen::Index>(preds.shape(0));
    const auto k = static_cast<Eigen::Index>(preds.shape(1));
    Eigen::MatrixXd P(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) P(i, j) = preds.at(i, j);
    }
    auto y = from_array(actual);
    edcast::ensemble::StackWeights w;
    switch (edcast::ensemble::parse_stack_variant(variant)) {
    case edcast::ensemble::StackVariant::convex: w = edcast::ensemble::fit_stack_convex(P, y, names); break;
    case edcast::ensemble::StackVariant::glm: w = edcast::ensemble::fit_stack_glm(P, y, names); break;
    case edcast::ensemble::StackVariant::penalized: w = edcast::ensemble::fit_stack_penalized(P, y, names); break;
    }
    return w.to_json().dump();
}

std::string importance(const std::string& config_json, const std::string& model, const std::string& base_dir,
                       bool identity_permutation) {
    auto config = edcast::cli::ExperimentConfig::from_json(json::parse(config_json), base_dir);
    auto data = edcast::cli::load_dataset(config);
    py::gil_scoped_release release;
    return edcast::cli::compute_importance(config, data, model, identity_permutation).to_json().dump();
}

} // namespace

PYBIND11_MODULE(_edcast, m) {
    m.doc() = "Bindings for the edcast forecasting engine";

    auto& error = py::register_exception<edcast::Error>(m, "EdcastError");
    auto& config_error = py::register_exception<edcast::ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<edcast::SpecRejected>(m, "SpecRejected", config_error.ptr());

    m.def("builtin_spec_names", &edcast::synth::builtin_names);
    m.def("_builtin_spec", [](const std::string& name) { return edcast::synth::builtin_spec(name).to_json().dump(); });
    m.def("_experiment_schema", [] { return edcast::cli::experiment_schema().dump(); });
    m.def("_dgp_spec_schema", [] { return edcast::cli::dgp_spec_schema().dump(); });
    m.def("_validate", [](const std::string& instance, const std::string& schema) {
        return edcast::cli::validate_schema(json::parse(instance), json::parse(schema));
    });
    m.def("_generate", &generate, py::arg("spec_json"), py::arg("n_days") = py::none());
    m.def("_run_experiment", &run_experiment, py::arg("config_json"), py::arg("base_dir") = ".");
    m.def("_fit_stack", &fit_stack, py::arg("variant"), py::arg("predictions"), py::arg("actual"), py::arg("names"));
    m.def("_importance", &importance, py::arg("config_json"), py::arg("model"), py::arg("base_dir") = ".",
          py::arg("identity_permutation") = false);
    m.def("adjust_trends", &adjust_trends, py::arg("frames"), py::arg("monthly"),
          "Stitch daily frames [(start, values)] and rescale each month to its monthly value.");
    m.def("mae", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& actual,
                    const py::array_t<double, py::array::c_style | py::array::forcecast>& predicted) {
        return edcast::mae(from_array(actual), from_array(predicted));
    }, py::arg("actual"), py::arg("predicted"));
    m.def("mape", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& actual,
                     const py::array_t<double, py::array::c_style | py::array::forcecast>& predicted) {
        return edcast::mape(from_array(actual), from_array(predicted));
    }, py::arg("actual"), py::arg("predicted"));
}
