#include "edcast/core/stl.hpp"

#include "edcast/core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace edcast {

namespace {

std::size_t next_odd_at_least(double x) {
    auto v = static_cast<std::size_t>(std::ceil(x - 1e-12));
    if (v % 2 == 0) ++v;
    return std::max<std::size_t>(v, 3);
}

// Local-linear tricube fit at abscissa `xs` (1-based positions) using points
// [nleft, nright]. Returns false when every weight vanishes.
bool loess_point(std::span<const double> y, std::size_t len, double xs, std::size_t nleft,
                 std::size_t nright, const std::vector<double>* rw, std::vector<double>& w,
                 double& out) {
    const auto n = static_cast<double>(y.size());
    const double range = n - 1.0;
    double h = std::max(xs - static_cast<double>(nleft), static_cast<double>(nright) - xs);
    if (len > y.size()) h += static_cast<double>((len - y.size()) / 2);
    const double h9 = 0.999 * h;
    const double h1 = 0.001 * h;

    double a = 0.0;
    for (std::size_t j = nleft; j <= nright; ++j) {
        w[j - 1] = 0.0;
        double r = std::abs(static_cast<double>(j) - xs);
        if (r <= h9) {
            if (r <= h1) {
                w[j - 1] = 1.0;
            } else {
                double q = r / h;
                q = 1.0 - q * q * q;
                w[j - 1] = q * q * q;
            }
            if (rw) w[j - 1] *= (*rw)[j - 1];
            a += w[j - 1];
        }
    }
    if (a <= 0.0) return false;

    for (std::size_t j = nleft; j <= nright; ++j) w[j - 1] /= a;
    if (h > 0.0) {
        a = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) a += w[j - 1] * static_cast<double>(j);
        double b = xs - a;
        double c = 0.0;
        for (std::size_t j = nleft; j <= nright; ++j) {
            double d = static_cast<double>(j) - a;
            c += w[j - 1] * d * d;
        }
        if (std::sqrt(c) > 0.001 * range) {
            b /= c;
            for (std::size_t j = nleft; j <= nright; ++j) {
                w[j - 1] *= b * (static_cast<double>(j) - a) + 1.0;
            }
        }
    }
    double ys = 0.0;
    for (std::size_t j = nleft; j <= nright; ++j) ys += w[j - 1] * y[j - 1];
    out = ys;
    return true;
}

// LOESS smooth of the whole sequence with span `len`, evaluated at every point.
void loess_smooth(std::span<const double> y, std::size_t len, const std::vector<double>* rw,
                  std::span<double> out) {
    const std::size_t n = y.size();
    if (n < 2) {
        std::copy(y.begin(), y.end(), out.begin());
        return;
    }
    std::vector<double> w(n);
    if (len >= n) {
        for (std::size_t i = 1; i <= n; ++i) {
            if (!loess_point(y, len, static_cast<double>(i), 1, n, rw, w, out[i - 1])) {
                out[i - 1] = y[i - 1];
            }
        }
        return;
    }
    const std::size_t nsh = (len + 1) / 2;
    std::size_t nleft = 1;
    std::size_t nright = len;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i > nsh && nright != n) {
            ++nleft;
            ++nright;
        }
        if (!loess_point(y, len, static_cast<double>(i), nleft, nright, rw, w, out[i - 1])) {
            out[i - 1] = y[i - 1];
        }
    }
}

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
    std::vector<double> out(x.size() - len + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += x[i];
    out[0] = s / static_cast<double>(len);
    for (std::size_t j = 1; j < out.size(); ++j) {
        s += x[j + len - 1] - x[j - 1];
        out[j] = s / static_cast<double>(len);
    }
    return out;
}

// Cycle-subseries smoothing; output has n + 2*period entries (one extra cycle
// extrapolated on each side).
void cycle_subseries(std::span<const double> y, std::size_t period, std::size_t span,
                     const std::vector<double>* rw, std::vector<double>& season) {
    const std::size_t n = y.size();
    season.assign(n + 2 * period, 0.0);
    std::vector<double> sub, subw, smooth, w;
    for (std::size_t j = 0; j < period; ++j) {
        const std::size_t k = (n - j - 1) / period + 1;
        sub.assign(k, 0.0);
        subw.assign(k, 1.0);
        for (std::size_t i = 0; i < k; ++i) {
            sub[i] = y[i * period + j];
            if (rw) subw[i] = (*rw)[i * period + j];
        }
        smooth.assign(k + 2, 0.0);
        const std::vector<double>* sw = rw ? &subw : nullptr;
        loess_smooth(sub, span, sw, std::span<double>(smooth).subspan(1, k));
        w.assign(k, 0.0);
        if (!loess_point(sub, span, 0.0, 1, std::min(span, k), sw, w, smooth[0])) {
            smooth[0] = smooth[1];
        }
        std::size_t nleft = k >= span ? k - span + 1 : 1;
        if (!loess_point(sub, span, static_cast<double>(k + 1), nleft, k, sw, w, smooth[k + 1])) {
            smooth[k + 1] = smooth[k];
        }
        for (std::size_t m = 0; m < k + 2; ++m) season[m * period + j] = smooth[m];
    }
}

void robustness_weights(std::span<const double> y, const std::vector<double>& fit,
                        std::vector<double>& rw) {
    const std::size_t n = y.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::abs(y[i] - fit[i]);
    std::vector<double> sorted = r;
    std::size_t mid1 = n / 2;
    std::size_t mid2 = (n - 1) / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid1), sorted.end());
    double v1 = sorted[mid1];
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid2), sorted.end());
    double v2 = sorted[mid2];
    const double cmad = 3.0 * (v1 + v2);
    rw.assign(n, 1.0);
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    // A (numerically) perfect fit leaves nothing to downweight.
    if (cmad <= 1e-12 * std::max(scale, 1.0)) return;
    const double c9 = 0.999 * cmad;
    const double c1 = 0.001 * cmad;
    for (std::size_t i = 0; i < n; ++i) {
        if (r[i] <= c1) {
            rw[i] = 1.0;
        } else if (r[i] <= c9) {
            double u = r[i] / cmad;
            u = 1.0 - u * u;
            rw[i] = u * u;
        } else {
            rw[i] = 0.0;
        }
    }
}

} // namespace

std::size_t stl_trend_span(std::size_t period, std::size_t seasonal_span) {
    const double p = static_cast<double>(period);
    return next_odd_at_least(1.5 * p / (1.0 - 1.5 / static_cast<double>(seasonal_span)));
}

Decomposition decompose_stl(std::span<const double> y, std::size_t period,
                            const StlOptions& options) {
    if (period < 2) throw ContractViolation("STL period must be at least 2");
    if (y.size() < 2 * period) {
        throw InsufficientData("STL needs at least two full periods (" +
                               std::to_string(2 * period) + " values), got " +
                               std::to_string(y.size()));
    }
    std::size_t ns = options.seasonal_span;
    if (ns < 3) ns = 3;
    if (ns % 2 == 0) ++ns;
    const std::size_t nt =
        options.trend_span ? options.trend_span : stl_trend_span(period, ns);
    const std::size_t nl =
        options.lowpass_span ? options.lowpass_span : next_odd_at_least(static_cast<double>(period));

    const std::size_t n = y.size();
    Decomposition d;
    d.trend.assign(n, 0.0);
    d.seasonal.assign(n, 0.0);

    std::vector<double> rw;
    bool use_rw = false;
    std::vector<double> detrended(n), season_ext, lowpass(n), deseason(n), fit(n);

    for (int outer = 0;; ++outer) {
        const std::vector<double>* w = use_rw ? &rw : nullptr;
        for (int inner = 0; inner < options.inner_iterations; ++inner) {
            for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - d.trend[i];
            cycle_subseries(detrended, period, ns, w, season_ext);
            auto ma1 = moving_average(season_ext, period);
            auto ma2 = moving_average(ma1, period);
            auto ma3 = moving_average(ma2, 3);
            loess_smooth(ma3, nl, nullptr, lowpass);
            for (std::size_t i = 0; i < n; ++i) {
                d.seasonal[i] = season_ext[period + i] - lowpass[i];
                deseason[i] = y[i] - d.seasonal[i];
            }
            loess_smooth(deseason, nt, w, d.trend);
        }
        if (outer >= options.outer_iterations) break;
        for (std::size_t i = 0; i < n; ++i) fit[i] = d.trend[i] + d.seasonal[i];
        robustness_weights(y, fit, rw);
        use_rw = true;
    }

    // Center each complete cycle of the seasonal component, moving the offset
    // into the trend so the decomposition stays additive.
    for (std::size_t b = 0; b + period <= n; b += period) {
        double m = 0.0;
        for (std::size_t i = b; i < b + period; ++i) m += d.seasonal[i];
        m /= static_cast<double>(period);
        for (std::size_t i = b; i < b + period; ++i) {
            d.seasonal[i] -= m;
            d.trend[i] += m;
        }
    }

    d.remainder.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.remainder[i] = y[i] - d.trend[i] - d.seasonal[i];
    return d;
}

Decomposition decompose_stl(const DailySeries& series, std::size_t period,
                            const StlOptions& options) {
    return decompose_stl(series.values(), period, options);
}

} // namespace edcast
