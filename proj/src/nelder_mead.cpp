#include "mivkit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace mivkit {

namespace {

double logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double logit(double f) {
    const double c = std::clamp(f, 1e-9, 1.0 - 1e-9);
    return std::log(c / (1.0 - c));
}

struct Box {
    const std::vector<double>& lo;
    const std::vector<double>& hi;

    std::vector<double> to_x(const std::vector<double>& t) const {
        std::vector<double> x(t.size());
        for (size_t i = 0; i < t.size(); ++i) x[i] = lo[i] + (hi[i] - lo[i]) * logistic(t[i]);
        return x;
    }
    std::vector<double> to_t(const std::vector<double>& x) const {
        std::vector<double> t(x.size());
        for (size_t i = 0; i < x.size(); ++i) t[i] = logit((x[i] - lo[i]) / (hi[i] - lo[i]));
        return t;
    }
};

struct Vertex {
    std::vector<double> t;
    double f = 0.0;
};

}  // namespace

OptimizeResult optimize(const std::function<double(const std::vector<double>&)>& objective,
                        const std::vector<double>& lower, const std::vector<double>& upper,
                        const std::vector<double>& x0, const OptimizeOptions& options) {
    const size_t dim = x0.size();
    if (lower.size() != dim || upper.size() != dim)
        throw std::invalid_argument("optimize: bound/initial dimension mismatch");
    for (size_t i = 0; i < dim; ++i) {
        if (!(lower[i] < upper[i])) throw std::invalid_argument("optimize: lower must be < upper");
        if (x0[i] < lower[i] || x0[i] > upper[i])
            throw std::invalid_argument("optimize: initial point outside bounds");
    }
    if (options.max_iterations < 1) throw std::invalid_argument("optimize: budget must be >= 1");

    OptimizeResult result;
    const Box box{lower, upper};
    auto eval_t = [&](const std::vector<double>& t) {
        const double f = objective(box.to_x(t));
        ++result.evaluations;
        return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
    };

    const std::vector<double> t0 = box.to_t(x0);
    {
        const double f0 = objective(x0);
        ++result.evaluations;
        if (std::isnan(f0)) throw std::runtime_error("optimize: objective is NaN at the initial point");
        result.x = x0;
        result.fx = f0;
    }

    std::mt19937_64 jitter_rng(options.seed);
    auto jitter01 = [&]() { return (static_cast<double>(jitter_rng() >> 11) + 0.5) * 0x1.0p-53; };

    for (int restart = 0; restart < options.restarts; ++restart) {
        std::vector<double> start = t0;
        if (restart > 0) {
            for (auto& ti : start) ti += (jitter01() * 2.0 - 1.0);
        }

        // Initial simplex: per-axis steps of 0.25 in logit space.
        std::vector<Vertex> simplex(dim + 1);
        simplex[0] = {start, eval_t(start)};
        for (size_t i = 0; i < dim; ++i) {
            Vertex v{start, 0.0};
            v.t[i] += 0.25;
            v.f = eval_t(v.t);
            simplex[i + 1] = v;
        }

        int iter = 0;
        for (; iter < options.max_iterations; ++iter) {
            // stable sort keeps the earlier vertex first on ties, so a flat
            // objective returns the initial point
            std::stable_sort(simplex.begin(), simplex.end(),
                             [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
            const double fl = simplex.front().f;
            const double fh = simplex.back().f;
            if (2.0 * std::fabs(fh - fl) <= options.rel_tol * (std::fabs(fh) + std::fabs(fl) + 1e-30))
                break;

            std::vector<double> centroid(dim, 0.0);
            for (size_t v = 0; v < dim; ++v)
                for (size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].t[i];
            for (auto& ci : centroid) ci /= static_cast<double>(dim);

            auto blend = [&](double coef) {
                std::vector<double> t(dim);
                for (size_t i = 0; i < dim; ++i)
                    t[i] = centroid[i] + coef * (simplex.back().t[i] - centroid[i]);
                return t;
            };

            const auto reflected = blend(-1.0);
            const double fr = eval_t(reflected);
            if (fr < simplex[0].f) {
                const auto expanded = blend(-2.0);
                const double fe = eval_t(expanded);
                if (fe < fr)
                    simplex.back() = {expanded, fe};
                else
                    simplex.back() = {reflected, fr};
                continue;
            }
            if (fr < simplex[dim - 1].f) {
                simplex.back() = {reflected, fr};
                continue;
            }
            const bool outside = fr < simplex.back().f;
            const auto contracted = blend(outside ? -0.5 : 0.5);
            const double fc = eval_t(contracted);
            if (fc < std::min(fr, simplex.back().f)) {
                simplex.back() = {contracted, fc};
                continue;
            }
            // shrink toward the best vertex
            for (size_t v = 1; v <= dim; ++v) {
                for (size_t i = 0; i < dim; ++i)
                    simplex[v].t[i] = simplex[0].t[i] + 0.5 * (simplex[v].t[i] - simplex[0].t[i]);
                simplex[v].f = eval_t(simplex[v].t);
            }
        }
        result.iterations += iter;

        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        if (simplex.front().f < result.fx) {
            result.fx = simplex.front().f;
            result.x = box.to_x(simplex.front().t);
        }
    }
    return result;
}

}  // namespace mivkit
