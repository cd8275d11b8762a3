#pragma once

// Picard iteration for the mild formulation
//   u(t) = S(t) u0 + int_0^t S(t - s) (|u(s)|^p + f) ds
// with S(t) realized by implicit Euler steps of the linear problem and a
// left-endpoint rule for the Duhamel integral on a uniform time grid.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "heisenheat/dynamics.hpp"

namespace heisenheat {

struct PicardConfig {
    double t_span = 0.1;
    int n_steps = 20;  ///< time slices; ds = t_span / n_steps
    int k_max = 30;
    double tol = 1e-12;  ///< stop when d_k <= tol * sup of the iterate
    double cg_rtol = 1e-12;
};

struct PicardResult {
    std::vector<double> distances;  ///< d_k = sup_t ||u_{k+1}(t) - u_k(t)||_inf
    std::vector<double> times;
    std::vector<std::vector<double>> final_iterate;  ///< slices at `times`
    bool converged = false;
    bool non_contraction = false;
    int iterations = 0;
};

namespace detail {

template <class Grid>
PicardResult picard_on(const ProblemSpec& spec, const Grid& g, const PicardConfig& cfg) {
    if (!(cfg.t_span > 0.0) || cfg.n_steps < 1 || cfg.k_max < 1)
        throw std::invalid_argument("picard_iterate: t_span, n_steps and k_max must be positive");
    // The propagator: the imex stepper with forcing and nonlinearity switched off.
    ProblemSpec linear = spec;
    linear.forcing = ForcingSpec::zero();
    linear.nonlinearity = false;
    linear.scheme = Scheme::imex;
    Evolution<Grid> prop(linear, g);

    const int m = cfg.n_steps;
    const double ds = cfg.t_span / m;
    const std::size_t n = g.size();
    const std::vector<double> u0 = prop.initial_values();
    const auto f = sample_forcing(spec, g);

    PicardResult res;
    res.times.resize(m + 1);
    for (int i = 0; i <= m; ++i) res.times[i] = i * ds;
    std::vector<std::vector<double>> cur(m + 1, u0), next(m + 1, std::vector<double>(n));
    std::vector<double> buf(n);
    int increases = 0;
    for (int k = 0; k < cfg.k_max; ++k) {
        // v_0 = u0, v_i = S(ds) (v_{i-1} + ds g(u_k(s_{i-1}))), which equals the Duhamel sum.
        next[0] = u0;
        for (int i = 1; i <= m; ++i) {
            const auto& prev_iter = cur[i - 1];
            for (std::size_t a = 0; a < n; ++a) {
                const double nl = spec.nonlinearity ? std::pow(std::abs(prev_iter[a]), spec.p) : 0.0;
                buf[a] = next[i - 1][a] + ds * (nl + f[a]);
            }
            if (spec.diffusion) {
                const StepInfo info = prop.step(buf, ds, next[i], cfg.cg_rtol, 4000);
                if (!info.cg.converged) throw std::runtime_error("picard_iterate: linear solve did not converge");
            } else {
                next[i] = buf;
            }
        }
        double d = 0.0, scale = 0.0;
        for (int i = 0; i <= m; ++i)
            for (std::size_t a = 0; a < n; ++a) {
                d = std::max(d, std::abs(next[i][a] - cur[i][a]));
                scale = std::max(scale, std::abs(next[i][a]));
            }
        if (!res.distances.empty() && d > res.distances.back()) ++increases;
        else increases = 0;
        res.distances.push_back(d);
        std::swap(cur, next);
        res.iterations = k + 1;
        if (d <= cfg.tol * scale) {
            res.converged = true;
            break;
        }
        if (increases >= 3) {
            res.non_contraction = true;
            break;
        }
    }
    res.final_iterate = std::move(cur);
    return res;
}

}  // namespace detail

inline PicardResult picard_iterate(const ProblemSpec& spec, const PicardConfig& cfg) {
    spec.validate();
    return std::visit([&](const auto& g) { return detail::picard_on(spec, g, cfg); }, spec.grid);
}

}  // namespace heisenheat
