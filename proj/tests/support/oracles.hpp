#pragma once

#include "edcast/features/matrix.hpp"
#include "edcast/ml/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

namespace oracles {

using edcast::features::FeatureKind;
using edcast::features::ModelMatrix;
using edcast::ml::MlModel;

inline std::vector<double> raw_row(const ModelMatrix& m, std::size_t r) {
    std::vector<double> v(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) v[c] = m.value(r, c);
    return v;
}

// Gaussian elimination with partial pivoting on the normal equations.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
    const std::size_t n = y.size(), p = X.size() + 1;
    std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
    auto x = [&](std::size_t i, std::size_t j) { return j == 0 ? 1.0 : X[j - 1][i]; };
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
            for (std::size_t i = 0; i < n; ++i) A[a][b] += x(i, a) * x(i, b);
        }
        for (std::size_t i = 0; i < n; ++i) A[a][p] += x(i, a) * y[i];
    }
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < p; ++r) {
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        }
        std::swap(A[c], A[piv]);
        for (std::size_t r = 0; r < p; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= p; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<double> beta(p);
    for (std::size_t c = 0; c < p; ++c) beta[c] = A[c][p] / A[c][c];
    return beta;
}

inline double sse_of(const MlModel& model, const ModelMatrix& m) {
    auto p = model.predict(m);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (m.target()[i] - p[i]) * (m.target()[i] - p[i]);
    return s;
}

// Exhaustive CART: every threshold and every subset of categorical levels,
// children scored by their directly computed sums of squares.
struct OracleTree {
    const ModelMatrix& m;
    double min_node;

    struct Node {
        int feature = -1;
        bool categorical = false;
        double threshold = 0.0;
        std::vector<int> left_levels;
        std::unique_ptr<Node> left, right;
        double value = 0.0;
    };

    static double sse(const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - mean) * (x - mean);
        return s;
    }

    std::unique_ptr<Node> grow(const std::vector<std::size_t>& rows) const {
        auto node = std::make_unique<Node>();
        std::vector<double> y;
        for (auto r : rows) y.push_back(m.target()[r]);
        node->value = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        const double lo = *std::min_element(y.begin(), y.end()), hi = *std::max_element(y.begin(), y.end());
        if (static_cast<double>(rows.size()) < 2 * min_node || lo == hi) return node;
        const double parent = sse(y);
        double best = parent;
        std::vector<std::size_t> best_left, best_right;
        auto try_split = [&](const std::vector<std::size_t>& L, const std::vector<std::size_t>& R) {
            if (static_cast<double>(L.size()) < min_node || static_cast<double>(R.size()) < min_node) return false;
            std::vector<double> yl, yr;
            for (auto r : L) yl.push_back(m.target()[r]);
            for (auto r : R) yr.push_back(m.target()[r]);
            const double s = sse(yl) + sse(yr);
            if (s < best - 1e-9) {
                best = s;
                best_left = L;
                best_right = R;
                return true;
            }
            return false;
        };
        for (std::size_t f = 0; f < m.cols(); ++f) {
            if (m.schema().features[f].kind == FeatureKind::categorical) {
                std::vector<int> levels;
                for (auto r : rows) levels.push_back(static_cast<int>(m.value(r, f)));
                std::sort(levels.begin(), levels.end());
                levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
                for (unsigned mask = 1; mask + 1 < (1u << levels.size()); ++mask) {
                    std::vector<int> left;
                    for (std::size_t k = 0; k < levels.size(); ++k) {
                        if (mask >> k & 1u) left.push_back(levels[k]);
                    }
                    std::vector<std::size_t> L, R;
                    for (auto r : rows) {
                        const int lv = static_cast<int>(m.value(r, f));
                        (std::find(left.begin(), left.end(), lv) != left.end() ? L : R).push_back(r);
                    }
                    if (try_split(L, R)) {
                        node->feature = static_cast<int>(f);
                        node->categorical = true;
                        node->left_levels = left;
                    }
                }
            } else {
                std::vector<double> xs;
                for (auto r : rows) xs.push_back(m.value(r, f));
                std::sort(xs.begin(), xs.end());
                xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
                for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
                    const double t = (xs[k] + xs[k + 1]) / 2.0;
                    std::vector<std::size_t> L, R;
                    for (auto r : rows) (m.value(r, f) <= t ? L : R).push_back(r);
                    if (try_split(L, R)) {
                        node->feature = static_cast<int>(f);
                        node->categorical = false;
                        node->threshold = t;
                    }
                }
            }
        }
        if (node->feature < 0) return node;
        node->left = grow(best_left);
        node->right = grow(best_right);
        return node;
    }

    static double predict(const Node& n, const std::vector<double>& row) {
        if (n.feature < 0) return n.value;
        const double x = row[static_cast<std::size_t>(n.feature)];
        bool left = n.categorical ? std::find(n.left_levels.begin(), n.left_levels.end(), static_cast<int>(x)) !=
                                        n.left_levels.end()
                                  : x <= n.threshold;
        return predict(left ? *n.left : *n.right, row);
    }
};

// Exhaustive k-nearest neighbours: numerics standardized with the training
// mean and 1/n standard deviation, flags as is, categoricals one-hot over all
// levels; stable sort on (distance, row).
inline double knn_predict(const ModelMatrix& train, const std::vector<double>& row, int k) {
    auto embed = [&](const std::vector<double>& r) {
        std::vector<double> out;
        for (std::size_t c = 0; c < train.cols(); ++c) {
            const auto& f = train.schema().features[c];
            if (f.kind == FeatureKind::categorical) {
                for (int l = 1; l <= f.levels; ++l) out.push_back(static_cast<int>(r[c]) == l ? 1.0 : 0.0);
            } else if (f.kind == FeatureKind::flag) {
                out.push_back(r[c]);
            } else {
                double mean = 0.0;
                for (std::size_t i = 0; i < train.rows(); ++i) mean += train.value(i, c);
                mean /= static_cast<double>(train.rows());
                double ss = 0.0;
                for (std::size_t i = 0; i < train.rows(); ++i) ss += (train.value(i, c) - mean) * (train.value(i, c) - mean);
                out.push_back((r[c] - mean) / std::sqrt(ss / static_cast<double>(train.rows())));
            }
        }
        return out;
    };
    const auto e = embed(row);
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t i = 0; i < train.rows(); ++i) {
        const auto p = embed(raw_row(train, i));
        double s = 0.0;
        for (std::size_t j = 0; j < e.size(); ++j) s += (p[j] - e[j]) * (p[j] - e[j]);
        d.emplace_back(s, i);
    }
    std::sort(d.begin(), d.end());
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += train.target()[d[static_cast<std::size_t>(i)].second];
    return sum / k;
}

// Lasso on one standardized predictor: soft-threshold of x'(y - ybar)/n.
inline double soft_threshold_coefficient(const std::vector<double>& x_std, const std::vector<double>& y, double lambda) {
    const double n = static_cast<double>(y.size());
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double z = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) z += x_std[i] * (y[i] - my);
    z /= n;
    return (z > 0 ? 1.0 : -1.0) * std::max(std::abs(z) - lambda, 0.0);
}

// Local-level model by conjugate normal updates: prior N(m, v), observe
// y ~ N(level, r), then the level diffuses by q. Returns filtered means and
// the final filtered variance.
inline std::pair<std::vector<double>, double> local_level(const std::vector<double>& y, double q, double r, double m0,
                                                          double v0) {
    std::vector<double> means;
    double m = m0, v = v0, post_v = v0;
    for (double obs : y) {
        const double prec = 1.0 / v + 1.0 / r;
        const double post_m = (m / v + obs / r) / prec;
        post_v = 1.0 / prec;
        means.push_back(post_m);
        m = post_m;
        v = post_v + q;
    }
    return {means, post_v};
}

inline double stack_sse(const Eigen::MatrixXd& P, const std::vector<double>& y, const std::vector<double>& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        double p = 0.0;
        for (Eigen::Index j = 0; j < P.cols(); ++j) p += w[static_cast<std::size_t>(j)] * P(i, j);
        s += (y[static_cast<std::size_t>(i)] - p) * (y[static_cast<std::size_t>(i)] - p);
    }
    return s;
}

// Smallest SSE over the three-model simplex grid with the given step count.
inline double simplex_grid_sse(const Eigen::MatrixXd& P, const std::vector<double>& y, int steps = 1000) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= steps; ++a) {
        for (int b = 0; a + b <= steps; ++b) {
            best = std::min(best, stack_sse(P, y, {double(a) / steps, double(b) / steps, double(steps - a - b) / steps}));
        }
    }
    return best;
}

} // namespace oracles
