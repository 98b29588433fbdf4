#include "edcast/core/optim.hpp"

#include "edcast/core/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edcast {

OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double> start, const NelderMeadOptions& opt,
                        const Bounds* bounds) {
    const std::size_t n = start.size();
    if (n == 0) throw ContractViolation("nelder_mead needs at least one parameter");
    if (bounds && (bounds->lower.size() != n || bounds->upper.size() != n)) {
        throw ContractViolation("nelder_mead bounds size mismatch");
    }

    OptimResult res;
    auto project = [&](std::vector<double>& x) {
        if (!bounds) return;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], bounds->lower[i], bounds->upper[i]);
    };
    auto eval = [&](std::vector<double>& x) {
        project(x);
        ++res.evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> fv(n + 1);
    fv[0] = eval(simplex[0]);
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = simplex[i + 1];
        double step = opt.initial_step;
        if (bounds && v[i] + step > bounds->upper[i]) step = -step;
        v[i] += step;
        fv[i + 1] = eval(v);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        const double fl = fv[best];
        const double fh = fv[worst];
        if (std::isfinite(fh) &&
            (fh - fl <= opt.reltol * (std::abs(fl) + opt.reltol) || fl <= opt.abstol)) {
            res.converged = true;
            break;
        }
        if (res.evals >= opt.max_evals) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
        double fr = eval(xr);
        if (fr < fl) {
            for (std::size_t i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
            double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        bool outside = fr < fh;
        for (std::size_t i = 0; i < n; ++i) {
            xc[i] = outside ? centroid[i] + 0.5 * (xr[i] - centroid[i])
                            : centroid[i] + 0.5 * (simplex[worst][i] - centroid[i]);
        }
        double fc = eval(xc);
        if (fc < std::min(fr, fh)) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        // shrink towards the best vertex
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == best) continue;
            for (std::size_t i = 0; i < n; ++i) {
                simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
            }
            fv[k] = eval(simplex[k]);
        }
    }

    std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.value = fv[best];
    return res;
}

} // namespace edcast
