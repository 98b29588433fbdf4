#include "edcast/ml/tree.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/text.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace edcast::ml {

namespace {

struct Split {
    int feature = -1;
    bool categorical = false;
    double threshold = 0.0;
    std::uint64_t mask = 0;
    double gain = 0.0;
};

class Builder {
public:
    Builder(const std::vector<const std::vector<double>*>& cols, const std::vector<features::FeatureKind>& kinds,
            const std::vector<double>& y, const std::vector<double>& w, const CartOptions& opt,
            std::mt19937_64* rng)
        : cols_(cols), kinds_(kinds), y_(y), w_(w), opt_(opt), rng_(rng) {}

    Tree run() {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            if (w_[i] > 0.0) rows.push_back(i);
        }
        if (rows.empty()) throw ContractViolation("cannot grow a tree without positively weighted rows");
        build(rows, 0);
        return std::move(tree_);
    }

private:
    int build(const std::vector<std::size_t>& rows, int depth) {
        double W = 0.0, S = 0.0;
        double lo = y_[rows[0]], hi = lo;
        for (std::size_t r : rows) {
            W += w_[r];
            S += w_[r] * y_[r];
            lo = std::min(lo, y_[r]);
            hi = std::max(hi, y_[r]);
        }
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        tree_.nodes[id].value = S / W;
        tree_.nodes[id].weight = W;
        if (depth >= opt_.max_depth || W < 2.0 * opt_.min_node || hi == lo) return id;

        const double range = hi - lo;
        // ties within rounding keep the earlier feature and threshold
        tie_ = 1e-12 * W * range * range;
        Split best;
        for (std::size_t f : candidates()) {
            if (kinds_[f] == features::FeatureKind::categorical) {
                categorical_split(rows, f, W, S, best);
            } else {
                numeric_split(rows, f, W, S, best);
            }
        }
        if (best.feature < 0 || best.gain <= 1e-12 * W * range * range) return id;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            const double x = (*cols_[static_cast<std::size_t>(best.feature)])[r];
            (goes_left(best, x) ? left : right).push_back(r);
        }
        tree_.nodes[id].feature = best.feature;
        tree_.nodes[id].categorical = best.categorical;
        tree_.nodes[id].threshold = best.threshold;
        tree_.nodes[id].left_levels = best.mask;
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    static bool goes_left(const Split& s, double x) {
        if (!s.categorical) return x <= s.threshold;
        const auto level = static_cast<long>(x);
        return level >= 1 && level <= 64 && ((s.mask >> (level - 1)) & 1u);
    }

    std::vector<std::size_t> candidates() {
        const std::size_t p = cols_.size();
        std::vector<std::size_t> all(p);
        std::iota(all.begin(), all.end(), 0);
        if (opt_.mtry == 0 || opt_.mtry >= p) return all;
        if (!rng_) throw ContractViolation("feature subsampling needs a random generator");
        for (std::size_t i = 0; i < opt_.mtry; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, p - 1);
            std::swap(all[i], all[pick(*rng_)]);
        }
        all.resize(opt_.mtry);
        std::sort(all.begin(), all.end());
        return all;
    }

    void consider(Split& best, double WL, double SL, double W, double S, Split candidate) {
        const double WR = W - WL;
        if (WL < opt_.min_node || WR < opt_.min_node) return;
        const double SR = S - SL;
        candidate.gain = SL * SL / WL + SR * SR / WR - S * S / W;
        if (candidate.gain > best.gain + tie_) best = candidate;
    }

    void numeric_split(const std::vector<std::size_t>& rows, std::size_t f, double W, double S, Split& best) {
        const auto& x = *cols_[f];
        order_.assign(rows.begin(), rows.end());
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
        double WL = 0.0, SL = 0.0;
        for (std::size_t i = 0; i + 1 < order_.size(); ++i) {
            const std::size_t r = order_[i];
            WL += w_[r];
            SL += w_[r] * y_[r];
            const double a = x[r], b = x[order_[i + 1]];
            if (!(a < b)) continue;
            double t = a + (b - a) / 2.0;
            if (!(t < b)) t = a;
            consider(best, WL, SL, W, S, {static_cast<int>(f), false, t, 0, 0.0});
        }
    }

    void categorical_split(const std::vector<std::size_t>& rows, std::size_t f, double W, double S, Split& best) {
        const auto& x = *cols_[f];
        std::array<double, 65> lw{}, ls{};
        for (std::size_t r : rows) {
            const auto level = static_cast<long>(x[r]);
            if (level < 1 || level > 64) throw ContractViolation("categorical level outside 1..64");
            lw[static_cast<std::size_t>(level)] += w_[r];
            ls[static_cast<std::size_t>(level)] += w_[r] * y_[r];
        }
        std::vector<int> present;
        for (int l = 1; l <= 64; ++l) {
            if (lw[static_cast<std::size_t>(l)] > 0.0) present.push_back(l);
        }
        // A split and its mirror are equivalent on the node's rows; the left
        // side never holds the highest present level, so unseen levels go right.
        std::uint64_t all = 0;
        for (int l : present) all |= std::uint64_t{1} << (l - 1);
        const std::uint64_t top = present.empty() ? 0 : std::uint64_t{1} << (present.back() - 1);
        auto canonical = [&](std::uint64_t m) { return (m & top) ? (all ^ m) : m; };
        std::stable_sort(present.begin(), present.end(), [&](int a, int b) {
            return ls[static_cast<std::size_t>(a)] / lw[static_cast<std::size_t>(a)] <
                   ls[static_cast<std::size_t>(b)] / lw[static_cast<std::size_t>(b)];
        });
        double WL = 0.0, SL = 0.0;
        std::uint64_t mask = 0;
        bool blocked = false;
        for (std::size_t i = 0; i + 1 < present.size(); ++i) {
            const auto l = static_cast<std::size_t>(present[i]);
            WL += lw[l];
            SL += ls[l];
            mask |= std::uint64_t{1} << (l - 1);
            blocked = blocked || WL < opt_.min_node || W - WL < opt_.min_node;
            consider(best, WL, SL, W, S, {static_cast<int>(f), true, 0.0, canonical(mask), 0.0});
        }
        // Ordering by mean only finds the best split among all subsets when
        // the node-size limit rejects none of the ordered splits.
        if (!blocked || present.size() > kExhaustiveLevels) return;
        const std::size_t k = present.size();
        for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << (k - 1)); ++subset) {
            double wl = 0.0, sl = 0.0;
            std::uint64_t m = 0;
            for (std::size_t i = 0; i < k; ++i) {
                if (!((subset >> i) & 1u)) continue;
                const auto l = static_cast<std::size_t>(present[i]);
                wl += lw[l];
                sl += ls[l];
                m |= std::uint64_t{1} << (l - 1);
            }
            consider(best, wl, sl, W, S, {static_cast<int>(f), true, 0.0, canonical(m), 0.0});
        }
    }

    static constexpr std::size_t kExhaustiveLevels = 16;

    const std::vector<const std::vector<double>*>& cols_;
    const std::vector<features::FeatureKind>& kinds_;
    const std::vector<double>& y_;
    const std::vector<double>& w_;
    const CartOptions& opt_;
    std::mt19937_64* rng_;
    Tree tree_;
    std::vector<std::size_t> order_;
    double tie_ = 0.0;
};

} // namespace

double Tree::predict(const double* row) const {
    std::size_t i = 0;
    for (;;) {
        const TreeNode& n = nodes[i];
        if (n.feature < 0) return n.value;
        const double x = row[n.feature];
        bool left;
        if (n.categorical) {
            const auto level = static_cast<long>(x);
            left = level >= 1 && level <= 64 && ((n.left_levels >> (level - 1)) & 1u);
        } else {
            left = x <= n.threshold;
        }
        i = static_cast<std::size_t>(left ? n.left : n.right);
    }
}

std::size_t Tree::leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

std::vector<int> Tree::split_features() const {
    std::vector<int> out;
    for (const auto& n : nodes) {
        if (n.feature >= 0) out.push_back(n.feature);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

nlohmann::json Tree::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& n : nodes) {
        nlohmann::json j = {{"value", format_roundtrip(n.value)}, {"weight", n.weight}};
        if (n.feature >= 0) {
            j["feature"] = n.feature;
            j["left"] = n.left;
            j["right"] = n.right;
            if (n.categorical) {
                std::vector<int> levels;
                for (int l = 1; l <= 64; ++l) {
                    if ((n.left_levels >> (l - 1)) & 1u) levels.push_back(l);
                }
                j["left_levels"] = levels;
            } else {
                j["threshold"] = format_roundtrip(n.threshold);
            }
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

Tree Tree::from_json(const nlohmann::json& arr) {
    auto number = [](const nlohmann::json& v) {
        double out = 0.0;
        if (v.is_string()) {
            if (!parse_double(v.get<std::string>(), out)) throw ContractViolation("bad number in tree snapshot");
            return out;
        }
        return v.get<double>();
    };
    Tree t;
    for (const auto& j : arr) {
        TreeNode n;
        n.value = number(j.at("value"));
        n.weight = j.value("weight", 0.0);
        if (j.contains("feature")) {
            n.feature = j.at("feature").get<int>();
            n.left = j.at("left").get<int>();
            n.right = j.at("right").get<int>();
            if (j.contains("left_levels")) {
                n.categorical = true;
                for (int l : j.at("left_levels").get<std::vector<int>>()) n.left_levels |= std::uint64_t{1} << (l - 1);
            } else {
                n.threshold = number(j.at("threshold"));
            }
        }
        t.nodes.push_back(n);
    }
    for (const auto& n : t.nodes) {
        if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || static_cast<std::size_t>(n.left) >= t.nodes.size() ||
                               static_cast<std::size_t>(n.right) >= t.nodes.size())) {
            throw ContractViolation("tree snapshot has dangling child references");
        }
    }
    if (t.nodes.empty()) throw ContractViolation("tree snapshot is empty");
    return t;
}

Tree grow_tree(const std::vector<const std::vector<double>*>& columns, const std::vector<features::FeatureKind>& kinds,
               const std::vector<double>& y, const std::vector<double>& weight, const CartOptions& options,
               std::mt19937_64* rng) {
    if (columns.size() != kinds.size()) throw ContractViolation("tree columns/kinds mismatch");
    if (weight.size() != y.size()) throw ContractViolation("tree weights/target mismatch");
    for (const auto* c : columns) {
        if (c->size() != y.size()) throw ContractViolation("tree column length mismatch");
    }
    return Builder(columns, kinds, y, weight, options, rng).run();
}

} // namespace edcast::ml
