#include "edcast/ts/arima.hpp"

#include "edcast/core/errors.hpp"
#include "edcast/core/optim.hpp"
#include "edcast/core/stl.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace edcast::ts {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootMargin = 1e-6;

// Coefficients (lag 0 first) of (1 - B)^d (1 - B^s)^D.
std::vector<double> difference_poly(int d, int D, int s) {
    std::vector<double> poly{1.0};
    auto times = [&](int lag) {
        std::vector<double> out(poly.size() + static_cast<std::size_t>(lag), 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            out[i] += poly[i];
            out[i + static_cast<std::size_t>(lag)] -= poly[i];
        }
        poly = std::move(out);
    };
    for (int i = 0; i < d; ++i) times(1);
    for (int i = 0; i < D; ++i) times(s);
    return poly;
}

std::vector<double> apply_difference(std::span<const double> y, const std::vector<double>& delta) {
    const std::size_t m = delta.size() - 1;
    if (y.size() <= m) return {};
    std::vector<double> w(y.size() - m);
    for (std::size_t t = m; t < y.size(); ++t) {
        double s = 0.0;
        for (std::size_t i = 0; i <= m; ++i) s += delta[i] * y[t - i];
        w[t - m] = s;
    }
    return w;
}

// Partial autocorrelations tanh(u) mapped to the coefficients of a stationary
// AR polynomial (Durbin-Levinson recursion).
std::vector<double> pacf_to_ar(const double* u, int k) {
    std::vector<double> coef(static_cast<std::size_t>(k)), work(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) coef[j] = work[j] = std::tanh(u[j]);
    for (int j = 1; j < k; ++j) {
        const double a = coef[j];
        for (int i = 0; i < j; ++i) work[i] -= a * coef[j - i - 1];
        for (int i = 0; i < j; ++i) coef[i] = work[i];
    }
    return coef;
}

// (1 + sign * sum a_i B^i)(1 + sign * sum b_i B^{s i}) -> lag 1.. coefficients
// in the same sign convention.
std::vector<double> expand(const std::vector<double>& a, const std::vector<double>& b, int s, double sign) {
    const std::size_t deg = a.size() + b.size() * static_cast<std::size_t>(s);
    std::vector<double> pa(a.size() + 1, 0.0), pb(b.size() * static_cast<std::size_t>(s) + 1, 0.0);
    pa[0] = pb[0] = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) pa[i + 1] = sign * a[i];
    for (std::size_t i = 0; i < b.size(); ++i) pb[(i + 1) * static_cast<std::size_t>(s)] = sign * b[i];
    std::vector<double> prod(deg + 1, 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        for (std::size_t j = 0; j < pb.size(); ++j) prod[i + j] += pa[i] * pb[j];
    }
    std::vector<double> out(deg);
    for (std::size_t i = 1; i <= deg; ++i) out[i - 1] = sign * prod[i];
    return out;
}

struct ArmaFilterOut {
    double loglik = -kInf;
    double sigma2 = 0.0;
    std::vector<double> a_next;  // predicted state for the step after the sample
};

// Exact Gaussian likelihood of an ARMA process (sigma^2 concentrated out)
// using the companion-form state space and a steady-state shortcut once the
// prediction covariance stops changing.
ArmaFilterOut arma_filter(std::span<const double> w, double mu, const std::vector<double>& phi_in,
                          const std::vector<double>& theta_in) {
    ArmaFilterOut out;
    const std::size_t r = std::max(phi_in.size(), theta_in.size() + 1);
    std::vector<double> phi(r, 0.0), R(r, 0.0);
    std::copy(phi_in.begin(), phi_in.end(), phi.begin());
    R[0] = 1.0;
    std::copy(theta_in.begin(), theta_in.end(), R.begin() + 1);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<long>(r), static_cast<long>(r));
    for (std::size_t i = 0; i < r; ++i) {
        T(static_cast<long>(i), 0) = phi[i];
        if (i + 1 < r) T(static_cast<long>(i), static_cast<long>(i + 1)) = 1.0;
    }
    Eigen::Map<Eigen::VectorXd> Rv(R.data(), static_cast<long>(r));
    const Eigen::MatrixXd RR = Rv * Rv.transpose();

    // Stationary covariance: P = T P T' + R R' by doubling.
    Eigen::MatrixXd P = RR, A = T;
    for (int it = 0; it < 80; ++it) {
        Eigen::MatrixXd Pn = P + A * P * A.transpose();
        A = A * A;
        double diff = (Pn - P).cwiseAbs().maxCoeff();
        P = std::move(Pn);
        if (!std::isfinite(diff)) return out;
        if (diff <= 1e-15 * std::max(1.0, P.cwiseAbs().maxCoeff())) break;
    }
    if (!P.allFinite()) return out;

    std::vector<double> a(r, 0.0), au(r), K(r);
    std::vector<double> Pm(P.data(), P.data() + r * r);  // column-major == row-major (symmetric)
    std::vector<double> Pu(r * r), TP(r * r), Pn(r * r);
    auto at = [r](std::vector<double>& M, std::size_t i, std::size_t j) -> double& { return M[i * r + j]; };

    bool steady = false;
    double F = 0.0, sum_log_f = 0.0, ssq = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        const double v = (w[t] - mu) - a[0];
        if (!steady) {
            F = Pm[0];
            if (!(F > 0.0) || !std::isfinite(F)) return out;
            for (std::size_t i = 0; i < r; ++i) K[i] = at(Pm, i, 0) / F;
        }
        sum_log_f += std::log(F);
        ssq += v * v / F;
        for (std::size_t i = 0; i < r; ++i) au[i] = a[i] + K[i] * v;
        for (std::size_t i = 0; i < r; ++i) a[i] = phi[i] * au[0] + (i + 1 < r ? au[i + 1] : 0.0);
        if (steady) continue;

        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) at(Pu, i, j) = at(Pm, i, j) - at(Pm, i, 0) * at(Pm, 0, j) / F;
        }
        // T Pu T' exploiting the companion structure.
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                at(TP, i, j) = phi[i] * at(Pu, 0, j) + (i + 1 < r ? at(Pu, i + 1, j) : 0.0);
            }
        }
        double change = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j) {
                double val = at(TP, i, 0) * phi[j] + (j + 1 < r ? at(TP, i, j + 1) : 0.0) + R[i] * R[j];
                change = std::max(change, std::abs(val - at(Pm, i, j)));
                at(Pn, i, j) = val;
            }
        }
        std::swap(Pm, Pn);
        if (change < 1e-12) {
            steady = true;
            F = Pm[0];
            for (std::size_t i = 0; i < r; ++i) K[i] = at(Pm, i, 0) / F;
        }
    }
    const auto n = static_cast<double>(w.size());
    out.sigma2 = ssq / n;
    if (!(out.sigma2 > 0.0) || !std::isfinite(out.sigma2)) return out;
    out.loglik = -0.5 * (n * std::log(2.0 * std::numbers::pi * out.sigma2) + n + sum_log_f);
    out.a_next = std::move(a);
    return out;
}

double css_objective(std::span<const double> w, double mu, const std::vector<double>& phi,
                     const std::vector<double>& theta) {
    const std::size_t start = phi.size();
    if (w.size() <= start) return kInf;
    std::vector<double> e(w.size(), 0.0);
    double ssq = 0.0;
    for (std::size_t t = start; t < w.size(); ++t) {
        double v = w[t] - mu;
        for (std::size_t i = 0; i < phi.size(); ++i) v -= phi[i] * (w[t - i - 1] - mu);
        for (std::size_t j = 0; j < theta.size() && j < t; ++j) v -= theta[j] * e[t - j - 1];
        e[t] = v;
        ssq += v * v;
    }
    const double s2 = ssq / static_cast<double>(w.size() - start);
    return s2 > 0.0 ? 0.5 * std::log(s2) : -kInf;
}

struct Decoded {
    std::vector<double> ar, ma, sar, sma;
    double mu = 0.0;
};

Decoded decode(const std::vector<double>& x, const ArimaOrder& o, bool mean, double w_mean, double w_sd) {
    Decoded d;
    const double* p = x.data();
    d.ar = pacf_to_ar(p, o.p);
    p += o.p;
    d.ma = pacf_to_ar(p, o.q);
    for (double& c : d.ma) c = -c;
    p += o.q;
    d.sar = pacf_to_ar(p, o.P);
    p += o.P;
    d.sma = pacf_to_ar(p, o.Q);
    for (double& c : d.sma) c = -c;
    p += o.Q;
    d.mu = mean ? w_mean + w_sd * *p : 0.0;
    return d;
}

} // namespace

std::string ArimaOrder::label() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")(" +
           std::to_string(P) + "," + std::to_string(D) + "," + std::to_string(Q) + ")[7]";
}

std::vector<ArimaOrder> default_arima_grid() {
    std::vector<ArimaOrder> grid;
    for (int d = 0; d <= 1; ++d)
        for (int D = 0; D <= 1; ++D)
            for (int p = 0; p <= 2; ++p)
                for (int q = 0; q <= 2; ++q)
                    for (int P = 0; P <= 1; ++P)
                        for (int Q = 0; Q <= 1; ++Q) grid.push_back({p, d, q, P, D, Q});
    return grid;
}

std::vector<double> ArimaSpec::full_ar() const { return expand(ar, sar, season, -1.0); }
std::vector<double> ArimaSpec::full_ma() const { return expand(ma, sma, season, 1.0); }

double min_root_modulus(const std::vector<double>& c_in, bool ar) {
    std::vector<double> c = c_in;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.empty()) return kInf;
    const auto k = static_cast<long>(c.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k, k);
    for (long j = 0; j < k; ++j) C(0, j) = ar ? c[static_cast<std::size_t>(j)] : -c[static_cast<std::size_t>(j)];
    for (long i = 1; i < k; ++i) C(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    double largest = es.eigenvalues().cwiseAbs().maxCoeff();
    return largest > 0.0 ? 1.0 / largest : kInf;
}

ArimaSpec fit_arima_order(const DailySeries& series, const ArimaOrder& o) {
    if (o.p < 0 || o.q < 0 || o.P < 0 || o.Q < 0 || o.d < 0 || o.D < 0) {
        throw ContractViolation("negative ARIMA order " + o.label());
    }
    ArimaSpec spec;
    spec.order = o;
    spec.include_mean = o.d + o.D == 0;
    const auto delta = difference_poly(o.d, o.D, spec.season);
    const auto w = apply_difference(series.values(), delta);
    const int npar = o.p + o.q + o.P + o.Q + (spec.include_mean ? 1 : 0);
    const int k = npar + 1;
    const std::size_t r = std::max<std::size_t>(o.p + 7 * o.P, o.q + 7 * o.Q + 1);
    if (w.size() <= r + static_cast<std::size_t>(k) + 1) {
        throw FitFailure("series too short for ARIMA" + o.label());
    }
    const double w_mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    double var = 0.0;
    for (double v : w) var += (v - w_mean) * (v - w_mean);
    double w_sd = std::sqrt(var / static_cast<double>(w.size()));
    if (!(w_sd > 0.0)) w_sd = 1.0;

    auto unpack = [&](const std::vector<double>& x) {
        Decoded d = decode(x, o, spec.include_mean, w_mean, w_sd);
        ArimaSpec s = spec;
        s.ar = d.ar, s.ma = d.ma, s.sar = d.sar, s.sma = d.sma, s.intercept = d.mu;
        return s;
    };
    std::vector<double> x(static_cast<std::size_t>(npar), 0.0);
    if (npar > 0) {
        auto css = [&](const std::vector<double>& par) {
            ArimaSpec s = unpack(par);
            return css_objective(w, s.intercept, s.full_ar(), s.full_ma());
        };
        NelderMeadOptions opt;
        x = nelder_mead(css, x, opt).x;
        auto nll = [&](const std::vector<double>& par) {
            ArimaSpec s = unpack(par);
            return -arma_filter(w, s.intercept, s.full_ar(), s.full_ma()).loglik;
        };
        auto ml = nelder_mead(nll, x, opt);
        if (!std::isfinite(ml.value)) throw FitFailure("likelihood not finite for ARIMA" + o.label(), ml.x);
        x = ml.x;
    }
    ArimaSpec s = unpack(x);
    auto f = arma_filter(w, s.intercept, s.full_ar(), s.full_ma());
    if (!std::isfinite(f.loglik)) throw FitFailure("likelihood not finite for ARIMA" + o.label(), x);
    if (min_root_modulus(s.full_ar(), true) <= 1.0 + kRootMargin ||
        min_root_modulus(s.full_ma(), false) <= 1.0 + kRootMargin) {
        throw FitFailure("ARIMA" + o.label() + " has roots on the unit circle", x);
    }
    const auto n = static_cast<double>(w.size());
    s.sigma2 = f.sigma2;
    s.loglik = f.loglik;
    s.n_used = w.size();
    s.aicc = -2.0 * f.loglik + 2.0 * k + 2.0 * k * (k + 1) / (n - k - 1);
    return s;
}

namespace {

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

} // namespace

double seasonal_strength(std::span<const double> values) {
    if (values.size() < 14) return 0.0;
    const auto dec = decompose_stl(values, 7);
    std::vector<double> sr(values.size());
    for (std::size_t i = 0; i < sr.size(); ++i) sr[i] = dec.seasonal[i] + dec.remainder[i];
    const double total = variance(sr);
    if (total <= 0.0) return 0.0;
    return std::max(0.0, 1.0 - variance(dec.remainder) / total);
}

double kpss_statistic(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) e[t] = values[t] - mean;
    const auto lags = static_cast<std::size_t>(3.0 * std::sqrt(static_cast<double>(n)) / 13.0);
    double s2 = 0.0;
    for (double x : e) s2 += x * x;
    for (std::size_t k = 1; k <= lags && k < n; ++k) {
        double c = 0.0;
        for (std::size_t t = k; t < n; ++t) c += e[t] * e[t - k];
        s2 += 2.0 * (1.0 - static_cast<double>(k) / static_cast<double>(lags + 1)) * c;
    }
    s2 /= static_cast<double>(n);
    if (!(s2 > 0.0)) return 0.0;
    double partial = 0.0, eta = 0.0;
    for (double x : e) {
        partial += x;
        eta += partial * partial;
    }
    return eta / (static_cast<double>(n) * static_cast<double>(n) * s2);
}

Differencing choose_differencing(std::span<const double> values) {
    constexpr double kSeasonalThreshold = 0.64;
    constexpr double kKpssCritical = 0.463;
    Differencing out;
    std::vector<double> w(values.begin(), values.end());
    if (seasonal_strength(w) > kSeasonalThreshold) {
        out.D = 1;
        std::vector<double> next;
        for (std::size_t t = 7; t < w.size(); ++t) next.push_back(w[t] - w[t - 7]);
        w = std::move(next);
    }
    if (kpss_statistic(w) > kKpssCritical) out.d = 1;
    return out;
}

ArimaModel fit_arima(const DailySeries& series, const std::vector<ArimaOrder>& grid) {
    if (grid.empty()) throw ContractViolation("ARIMA grid is empty");
    if (series.size() < 21) throw InsufficientData("ARIMA needs at least 21 observations");
    const auto v = series.values();
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) {
        ArimaSpec s;
        s.include_mean = true;
        s.intercept = v[0];
        s.n_used = v.size();
        return ArimaModel(s, series);
    }
    const Differencing diff = choose_differencing(v);
    std::vector<ArimaOrder> eligible;
    for (const auto& o : grid) {
        if (o.d == diff.d && o.D == diff.D) eligible.push_back(o);
    }
    if (eligible.empty()) eligible = grid;
    std::optional<ArimaSpec> best;
    std::string last_error;
    for (const auto& o : eligible) {
        try {
            ArimaSpec s = fit_arima_order(series, o);
            if (!best || s.aicc < best->aicc) best = std::move(s);
        } catch (const FitFailure& e) {
            last_error = e.what();
        }
    }
    if (!best) throw FitFailure("no ARIMA candidate could be fitted: " + last_error);
    return ArimaModel(*best, series);
}

ArimaModel::ArimaModel(ArimaSpec spec, const DailySeries& series) : spec_(std::move(spec)) {
    const auto delta = difference_poly(spec_.order.d, spec_.order.D, spec_.season);
    const auto w = apply_difference(series.values(), delta);
    if (w.empty()) throw InsufficientData("series too short for ARIMA" + spec_.order.label());
    const auto m = delta.size() - 1;
    tail_.assign(series.values().end() - static_cast<long>(m), series.values().end());
    bool flat = std::all_of(w.begin(), w.end(), [&](double x) { return x == spec_.intercept; });
    auto phi = spec_.full_ar();
    auto theta = spec_.full_ma();
    const std::size_t r = std::max(phi.size(), theta.size() + 1);
    if (flat) {
        a_next_.assign(r, 0.0);
    } else {
        auto f = arma_filter(w, spec_.intercept, phi, theta);
        if (f.a_next.empty()) throw FitFailure("ARIMA filter failed on the new window");
        a_next_ = std::move(f.a_next);
    }
    phi.resize(r, 0.0);
    phi_ = std::move(phi);
}

double ArimaModel::forecast_impl(int h) const {
    const std::size_t r = phi_.size();
    std::vector<double> a = a_next_, b(r);
    std::vector<double> w(static_cast<std::size_t>(h));
    for (int k = 0; k < h; ++k) {
        w[static_cast<std::size_t>(k)] = a[0] + spec_.intercept;
        for (std::size_t i = 0; i < r; ++i) b[i] = phi_[i] * a[0] + (i + 1 < r ? a[i + 1] : 0.0);
        std::swap(a, b);
    }
    const auto delta = difference_poly(spec_.order.d, spec_.order.D, spec_.season);
    const std::size_t m = delta.size() - 1;
    std::vector<double> y = tail_;
    for (int k = 0; k < h; ++k) {
        double v = w[static_cast<std::size_t>(k)];
        const std::size_t t = y.size();
        for (std::size_t i = 1; i <= m; ++i) v -= delta[i] * y[t - i];
        y.push_back(v);
    }
    return y.back();
}

std::shared_ptr<const TsModel> ArimaModel::refilter(const DailySeries& series) const {
    return std::make_shared<ArimaModel>(spec_, series);
}

nlohmann::json ArimaModel::snapshot() const {
    const auto& o = spec_.order;
    return {{"kind", "arima"},
            {"order", {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}}},
            {"season", spec_.season},
            {"ar", spec_.ar},
            {"ma", spec_.ma},
            {"sar", spec_.sar},
            {"sma", spec_.sma},
            {"include_mean", spec_.include_mean},
            {"intercept", spec_.intercept},
            {"sigma2", spec_.sigma2},
            {"loglik", spec_.loglik},
            {"aicc", spec_.aicc},
            {"n_used", spec_.n_used}};
}

ArimaSpec ArimaModel::spec_from_json(const nlohmann::json& j) {
    ArimaSpec s;
    const auto& o = j.at("order");
    s.order = {o.at("p").get<int>(), o.at("d").get<int>(), o.at("q").get<int>(),
               o.at("P").get<int>(), o.at("D").get<int>(), o.at("Q").get<int>()};
    s.season = j.value("season", 7);
    s.ar = j.at("ar").get<std::vector<double>>();
    s.ma = j.at("ma").get<std::vector<double>>();
    s.sar = j.at("sar").get<std::vector<double>>();
    s.sma = j.at("sma").get<std::vector<double>>();
    s.include_mean = j.at("include_mean").get<bool>();
    s.intercept = j.at("intercept").get<double>();
    s.sigma2 = j.at("sigma2").get<double>();
    s.loglik = j.value("loglik", 0.0);
    s.aicc = j.value("aicc", 0.0);
    s.n_used = j.value("n_used", std::size_t{0});
    return s;
}

} // namespace edcast::ts
