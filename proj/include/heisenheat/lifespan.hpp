#pragma once

// Lifespan sweep over forcing amplitudes: T_eps for f = eps |eta|_H^{-2 lambda_f}
// (capped on the unit ball) and zero initial data, with a log-log fit.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisenheat/dynamics.hpp"
#include "heisenheat/fit.hpp"
#include "heisenheat/parallel.hpp"

namespace heisenheat {

/// Grid and step controls at a reference amplitude, rescaled for each eps.
/// With s = (eps_ref / eps)^scale_exponent: r_max ~ sqrt(s), tau_half ~ s, dt0 ~ sqrt(s).
struct LifespanConfig {
    double eps_ref = 0.1;
    CylGrid base_grid{1, 64.0, 2400.0, 128, 800};
    SolveConfig solve{};
    double scale_exponent = 0.8;
    double inner_cap = 1.0;
    int workers = 1;

    LifespanConfig() {
        solve.t_end = 1e5;
        solve.dt0 = 0.5;
    }

    double scale_for(double eps) const { return std::pow(eps_ref / eps, scale_exponent); }

    CylGrid grid_for(double eps) const {
        const double s = scale_for(eps);
        CylGrid g = base_grid;
        g.r_max *= std::sqrt(s);
        g.tau_half *= s;
        return g;
    }

    SolveConfig solve_for(double eps) const {
        SolveConfig c = solve;
        c.dt0 *= std::sqrt(scale_for(eps));
        return c;
    }
};

struct LifespanRow {
    double epsilon = 0.0;
    SolveStatus status = SolveStatus::inconclusive;
    std::string reason;
    double t_lower = 0.0, t_upper = 0.0;
    double t_eps = 0.0;  ///< bracket midpoint
    double peak_norm = 0.0;
    bool used = false;   ///< entered the fit
};

struct LifespanReport {
    std::vector<LifespanRow> rows;
    double lifespan_mu = 0.0;        ///< lambda_f - p/(p-1)
    double theoretical_slope = 0.0;  ///< 1 / lifespan_mu
    bool fitted = false;
    ScalingFit fit;
    double bound_ratio = 0.0;     ///< max / min of T_eps * eps^{-1/mu} over used rows
    double bound_constant = 0.0;  ///< max of T_eps * eps^{-1/mu}
    std::string note;
};

inline LifespanReport measure_lifespan(const std::vector<double>& eps_list, double lambda_f, double p,
                                       const GroupDims& dims, const LifespanConfig& cfg) {
    const double pc = p / (p - 1.0);
    if (!(p > 1.0) || !(p < dims.second_exponent()))
        throw std::invalid_argument("measure_lifespan: needs 1 < p < Q/(Q-2)");
    if (!(lambda_f > dims.q / 2.0) || !(lambda_f < pc))
        throw std::invalid_argument("measure_lifespan: needs Q/2 < lambda_f < p/(p-1)");
    if (cfg.base_grid.n != dims.n) throw std::invalid_argument("measure_lifespan: grid N differs from dims");
    for (double e : eps_list)
        if (!(e > 0.0)) throw std::invalid_argument("measure_lifespan: eps must be positive");

    LifespanReport rep;
    rep.lifespan_mu = lambda_f - pc;
    rep.theoretical_slope = 1.0 / rep.lifespan_mu;
    rep.rows = parallel_map_indexed<LifespanRow>(eps_list.size(), cfg.workers, [&](std::size_t i) {
        const double eps = eps_list[i];
        ProblemSpec spec;
        spec.dims = dims;
        spec.p = p;
        spec.forcing = ForcingSpec::singular_power(eps, lambda_f, cfg.inner_cap);
        spec.init = InitialData::zero();
        spec.grid = cfg.grid_for(eps);
        const SolveOutcome o = solve_until(spec, cfg.solve_for(eps));
        LifespanRow row;
        row.epsilon = eps;
        row.status = o.status;
        row.reason = o.reason;
        row.t_lower = o.t_lower;
        row.t_upper = o.t_upper;
        row.peak_norm = o.peak_norm;
        if (o.status == SolveStatus::blew_up) {
            row.t_eps = 0.5 * (o.t_lower + o.t_upper);
            row.used = true;
        } else {
            // Survival to the horizon or a dirty boundary: excluded from the fit.
            row.status = SolveStatus::inconclusive;
            row.t_lower = row.t_upper = o.t_reached;
        }
        return row;
    });

    std::vector<ScalingSample> samples;
    double cmin = INFINITY, cmax = 0.0;
    for (const auto& r : rep.rows) {
        if (!r.used) continue;
        samples.push_back({r.epsilon, r.t_eps});
        const double c = r.t_eps * std::pow(r.epsilon, -rep.theoretical_slope);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    if (!samples.empty()) {
        rep.bound_ratio = cmax / cmin;
        rep.bound_constant = cmax;
    }
    try {
        rep.fit = fit_exponent(samples, rep.theoretical_slope);
        rep.fitted = true;
    } catch (const std::invalid_argument& e) {
        rep.note = e.what();
    }
    return rep;
}

}  // namespace heisenheat
