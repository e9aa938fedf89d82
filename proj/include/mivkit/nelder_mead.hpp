#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace mivkit {

struct OptimizeOptions {
    int max_iterations = 2000;  // per restart
    int restarts = 3;           // initial point plus seeded jitters
    double rel_tol = 1e-6;      // relative objective spread for termination
    std::uint64_t seed = 0;
};

struct OptimizeResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;   // summed over restarts
    int evaluations = 0;
};

// Bounded derivative-free minimization: Nelder-Mead run in a logit-transformed
// box so iterates can never leave [lo, hi]. Deterministic given the seed. The
// initial point is always evaluated and kept as a candidate, so the result is
// never worse than x0. Throws std::runtime_error if the objective is NaN at
// the initial point; NaN anywhere else is treated as +inf.
OptimizeResult optimize(const std::function<double(const std::vector<double>&)>& objective,
                        const std::vector<double>& lower, const std::vector<double>& upper,
                        const std::vector<double>& x0, const OptimizeOptions& options = {});

}  // namespace mivkit
