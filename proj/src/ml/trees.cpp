#include "edcast/ml/trees.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/parallel.hpp"
#include "edcast/core/random.hpp"
#include "edcast/core/text.hpp"

#include <cmath>
#include <numeric>

namespace edcast::ml {

namespace {

struct Canonical {
    std::vector<std::vector<double>> columns;
    std::vector<const std::vector<double>*> ptrs;
    std::vector<features::FeatureKind> kinds;
    std::vector<double> y;
    std::vector<double> rows;  // row-major copy for prediction
};

Canonical canonical(const features::ModelMatrix& m) {
    const auto order = canonical_row_order(m);
    Canonical c;
    c.columns.resize(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        c.columns[j].reserve(m.rows());
        for (std::size_t r : order) c.columns[j].push_back(m.value(r, j));
        c.kinds.push_back(m.schema().features[j].kind);
    }
    for (const auto& col : c.columns) c.ptrs.push_back(&col);
    for (std::size_t r : order) c.y.push_back(m.target()[r]);
    c.rows.resize(m.rows() * m.cols());
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) c.rows[i * m.cols() + j] = c.columns[j][i];
    }
    return c;
}

std::size_t whole(const HyperParams& hp, const std::string& key, double fallback) {
    return static_cast<std::size_t>(hp.get_or(key, fallback));
}

nlohmann::json trees_json(const std::vector<Tree>& trees) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return arr;
}

std::vector<Tree> trees_from_json(const nlohmann::json& j) {
    std::vector<Tree> out;
    for (const auto& t : j) out.push_back(Tree::from_json(t));
    return out;
}

} // namespace

GbmModel::GbmModel(std::shared_ptr<const features::Schema> schema, HyperParams hp, double f0, std::vector<Tree> trees,
                   std::vector<double> loss_curve)
    : MlModel(std::move(schema)), hp_(std::move(hp)), f0_(f0), lr_(hp_.get_or("learning_rate", 0.1)),
      trees_(std::move(trees)), loss_(std::move(loss_curve)) {}

double GbmModel::predict_raw(const double* values) const {
    double f = f0_;
    for (const auto& t : trees_) f += lr_ * t.predict(values);
    return f;
}

GbmModel GbmModel::truncated(std::size_t n) const {
    if (n > trees_.size()) throw ContractViolation("cannot truncate a boosted model to more trees than it has");
    HyperParams hp = hp_;
    hp.set("n_trees", static_cast<double>(n));
    std::vector<Tree> trees(trees_.begin(), trees_.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> loss;
    if (loss_.size() > n) loss.assign(loss_.begin(), loss_.begin() + static_cast<std::ptrdiff_t>(n + 1));
    return GbmModel(std::make_shared<const features::Schema>(schema()), hp, f0_, std::move(trees), std::move(loss));
}

nlohmann::json GbmModel::snapshot() const {
    return {{"kind", "gbm"},
            {"schema", features::schema_to_json(schema())},
            {"hyperparams", hp_.to_json()},
            {"initial", format_roundtrip(f0_)},
            {"trees", trees_json(trees_)}};
}

RfModel::RfModel(std::shared_ptr<const features::Schema> schema, HyperParams hp, std::vector<Tree> trees)
    : MlModel(std::move(schema)), hp_(std::move(hp)), trees_(std::move(trees)) {
    if (trees_.empty()) throw ContractViolation("random forest needs at least one tree");
}

double RfModel::predict_raw(const double* values) const {
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(values);
    return sum / static_cast<double>(trees_.size());
}

nlohmann::json RfModel::snapshot() const {
    return {{"kind", "rf"},
            {"schema", features::schema_to_json(schema())},
            {"hyperparams", hp_.to_json()},
            {"trees", trees_json(trees_)}};
}

std::size_t resolve_mtry(const HyperParams& hp, std::size_t p) {
    if (hp.has("mtry")) return std::min(p, static_cast<std::size_t>(hp.get("mtry")));
    return std::max<std::size_t>(1, p / 3);
}

GbmModel fit_gbm(const features::ModelMatrix& m, const HyperParams& hp) {
    validate(ModelKind::gbm, hp);
    const std::size_t n_trees = whole(hp, "n_trees", 100);
    const double lr = hp.get_or("learning_rate", 0.1);
    CartOptions opt;
    opt.max_depth = static_cast<int>(hp.get_or("depth", 3));
    opt.min_node = hp.get_or("min_node", 10);
    if (static_cast<double>(m.rows()) < 2.0 * opt.min_node) {
        throw ContractViolation("boosting needs at least 2 x min_node rows");
    }
    const Canonical c = canonical(m);
    const std::size_t n = c.y.size();
    const std::size_t p = m.cols();
    const double f0 = std::accumulate(c.y.begin(), c.y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> F(n, f0), resid(n);
    const std::vector<double> w(n, 1.0);
    auto mse = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (c.y[i] - F[i]) * (c.y[i] - F[i]);
        return s / static_cast<double>(n);
    };
    std::vector<double> loss{mse()};
    std::vector<Tree> trees;
    trees.reserve(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = c.y[i] - F[i];
        Tree tree = grow_tree(c.ptrs, c.kinds, resid, w, opt, nullptr);
        for (std::size_t i = 0; i < n; ++i) F[i] += lr * tree.predict(&c.rows[i * p]);
        trees.push_back(std::move(tree));
        loss.push_back(mse());
    }
    return GbmModel(m.schema_ptr(), hp, f0, std::move(trees), std::move(loss));
}

RfModel fit_rf(const features::ModelMatrix& m, const HyperParams& hp, const FitOptions& options) {
    validate(ModelKind::rf, hp);
    const std::size_t n_trees = whole(hp, "n_trees", 300);
    CartOptions opt;
    opt.min_node = hp.get_or("min_node", 5);
    opt.mtry = resolve_mtry(hp, m.cols());
    if (m.rows() == 0) throw ContractViolation("random forest needs at least one row");
    const Canonical c = canonical(m);
    const std::size_t n = c.y.size();
    std::vector<Tree> trees(n_trees);
    parallel_for(n_trees, options.jobs, [&](std::size_t t) {
        std::mt19937_64 rng(derive_seed(options.seed, {t}));
        std::vector<double> w(n, options.bootstrap ? 0.0 : 1.0);
        if (options.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t i = 0; i < n; ++i) w[pick(rng)] += 1.0;
        }
        trees[t] = grow_tree(c.ptrs, c.kinds, c.y, w, opt, &rng);
    });
    return RfModel(m.schema_ptr(), hp, std::move(trees));
}

namespace detail {

std::shared_ptr<const MlModel> load_gbm(const nlohmann::json& j, std::shared_ptr<const features::Schema> schema) {
    double f0 = 0.0;
    if (!parse_double(j.at("initial").get<std::string>(), f0)) throw ContractViolation("bad gbm initial value");
    auto hp = HyperParams::from_json(j.at("hyperparams"));
    validate(ModelKind::gbm, hp);
    return std::make_shared<GbmModel>(std::move(schema), hp, f0, trees_from_json(j.at("trees")),
                                      std::vector<double>{});
}

std::shared_ptr<const MlModel> load_rf(const nlohmann::json& j, std::shared_ptr<const features::Schema> schema) {
    auto hp = HyperParams::from_json(j.at("hyperparams"));
    validate(ModelKind::rf, hp);
    return std::make_shared<RfModel>(std::move(schema), hp, trees_from_json(j.at("trees")));
}

} // namespace detail

} // namespace edcast::ml
