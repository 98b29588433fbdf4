#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace edcast {

struct Bounds {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct NelderMeadOptions {
    int max_evals = 500;
    double reltol = 1e-8;
    double abstol = -std::numeric_limits<double>::infinity();
    double initial_step = 0.1;  // absolute step used to build the starting simplex
};

struct OptimResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    int evals = 0;
    bool converged = false;
};

/// Derivative-free Nelder-Mead. With bounds, every trial point is projected
/// onto the box before evaluation. Non-finite objective values are treated as
/// +infinity.
OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                        std::vector<double> start, const NelderMeadOptions& options = {},
                        const Bounds* bounds = nullptr);

} // namespace edcast
