#pragma once

// Time integration of u_t - Lu = |u|^p + f on a truncated box or cylinder,
// with adaptive steps, blow-up detection and a boundary-mass monitor.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "heisenheat/forcing.hpp"
#include "heisenheat/grid.hpp"
#include "heisenheat/group.hpp"
#include "heisenheat/linear_solver.hpp"
#include "heisenheat/sublaplacian.hpp"

namespace heisenheat {

enum class Scheme { explicit_euler, imex };

inline const char* to_string(Scheme s) { return s == Scheme::explicit_euler ? "explicit_euler" : "imex"; }

using ProblemGrid = std::variant<BoxGrid3, CylGrid>;

struct ProblemSpec {
    GroupDims dims{1};
    double p = 1.5;
    ForcingSpec forcing;
    InitialData init;
    ProblemGrid grid = CylGrid{};
    Scheme scheme = Scheme::imex;
    bool diffusion = true;     ///< false drops L (pointwise ODE limit)
    bool nonlinearity = true;  ///< false drops |u|^p
    OperatorForm box_form = OperatorForm::composed;
    OperatorForm cyl_form = OperatorForm::cylindrical_flux;
    bool cell_average_forcing = true;  ///< cylinder only: sample f as weighted cell averages

    double fujita_exponent() const { return dims.fujita_exponent(); }
    double second_exponent() const { return dims.second_exponent(); }

    void validate() const {
        if (!(p > 1.0)) throw std::invalid_argument("ProblemSpec: p must exceed 1");
        std::visit(
            [&](const auto& g) {
                g.validate();
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, BoxGrid3>) {
                    if (dims.n != 1) throw std::invalid_argument("ProblemSpec: the box grid requires N = 1");
                    if (scheme == Scheme::imex && box_form != OperatorForm::composed)
                        throw std::invalid_argument("ProblemSpec: imex on the box needs the composed operator");
                } else {
                    if (g.n != dims.n) throw std::invalid_argument("ProblemSpec: cylinder N differs from dims");
                    if (scheme == Scheme::imex && cyl_form != OperatorForm::cylindrical_flux)
                        throw std::invalid_argument("ProblemSpec: imex on the cylinder needs the flux form");
                }
            },
            grid);
    }
};

/// Forcing on the grid: pointwise, or as weighted cell averages on the cylinder.
template <class Grid>
std::vector<double> sample_forcing(const ProblemSpec& spec, const Grid& g) {
    const auto& f = spec.forcing;
    auto fn = [&](double r, double tau) { return f.eval_rt(r, tau); };
    if constexpr (std::is_same_v<Grid, CylGrid>)
        if (spec.cell_average_forcing) return cell_average_rt(g, fn).values;
    return sample_rt(g, fn).values;
}

struct StepInfo {
    CgResult cg{0, 0.0, true};
    bool finite = true;
};

/// One-step integrator bound to a problem and grid type.
template <class Grid>
class Evolution {
public:
    using Op = DiscreteSubLaplacian<Grid>;

    Evolution(const ProblemSpec& spec, const Grid& g) : spec_(spec), grid_(g) {
        spec_.validate();
        if constexpr (std::is_same_v<Grid, BoxGrid3>) {
            op_.emplace(g, spec.box_form);
            weights_.assign(g.size(), 1.0);
        } else {
            op_.emplace(g, spec.cyl_form);
            weights_.resize(g.size());
            for (int j = 0; j < g.nr; ++j)
                std::fill_n(weights_.begin() + static_cast<std::ptrdiff_t>(g.index(j, 0)), g.ntau,
                            op_->radial_weights()[j]);
        }
        forcing_ = sample_forcing(spec, g);
        lu_.resize(g.size());
        rhs_.resize(g.size());
    }

    const Grid& grid() const { return grid_; }
    const ProblemSpec& spec() const { return spec_; }
    int bandwidth() const { return op_->bandwidth(); }

    std::vector<double> initial_values() const {
        const auto& init = spec_.init;
        return sample_rt(grid_, [&](double r, double tau) { return init.eval_rt(r, tau); }).values;
    }

    /// Largest stable explicit step: 0.9 over the Gershgorin bound (infinite without diffusion).
    double explicit_dt_bound() const {
        if (!spec_.diffusion) return std::numeric_limits<double>::infinity();
        return 0.9 / op_->gershgorin_bound();
    }

    void apply_operator(std::span<const double> u, std::span<double> out) const { op_->apply(u, out); }

    /// Advance u by dt into out (out may not alias u).
    StepInfo step(std::span<const double> u, double dt, std::span<double> out, double rtol = 1e-10,
                  int max_iter = 2000) {
        const std::size_t n = u.size();
        const double p = spec_.p;
        const bool nl = spec_.nonlinearity;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = (nl ? std::pow(std::abs(u[i]), p) : 0.0) + forcing_[i];
            rhs_[i] = u[i] + dt * g;
        }
        StepInfo info;
        if (!spec_.diffusion) {
            std::copy(rhs_.begin(), rhs_.end(), out.begin());
        } else if (spec_.scheme == Scheme::explicit_euler) {
            op_->apply(u, lu_);
            for (std::size_t i = 0; i < n; ++i) out[i] = rhs_[i] + dt * lu_[i];
        } else {
            std::copy(u.begin(), u.end(), out.begin());
            auto apply_l = [this](std::span<const double> in, std::span<double> o) { op_->apply(in, o); };
            prepare_preconditioner(dt);
            if constexpr (std::is_same_v<Grid, BoxGrid3>)
                info.cg = solve_implicit(apply_l, weights_, dt, rhs_, out, *jacobi_, rtol, max_iter);
            else
                info.cg = solve_implicit(apply_l, weights_, dt, rhs_, out, *line_, rtol, max_iter);
        }
        info.finite = std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
        return info;
    }

private:
    void prepare_preconditioner(double dt) {
        if (precond_dt_ == dt) return;
        precond_dt_ = dt;
        if constexpr (std::is_same_v<Grid, BoxGrid3>)
            jacobi_.emplace(weights_, op_->diagonal(), dt);
        else
            line_.emplace(*op_, dt);
    }

    ProblemSpec spec_;
    Grid grid_;
    std::optional<Op> op_;
    std::vector<double> weights_, forcing_, lu_, rhs_;
    double precond_dt_ = -1.0;
    std::optional<JacobiPreconditioner> jacobi_;
    std::optional<TauLinePreconditioner> line_;
};

struct SolveConfig {
    double t_end = 1.0;
    double dt0 = 1e-2;
    double blowup_threshold = 1e8;
    double dt_min = 0.0;  ///< 0 selects 1e-12 * t_end
    double growth_cap = 1.2;
    double regrow_below = 1.05;  ///< growth under this factor lets dt grow back toward dt0
    double regrow_factor = 1.5;
    double boundary_tol = 1e-6;
    double cg_rtol = 1e-10;
    int cg_max_iter = 2000;
    bool store_history = false;

    double effective_dt_min() const { return dt_min > 0.0 ? dt_min : 1e-12 * t_end; }

    void validate() const {
        if (!(t_end > 0.0)) throw std::invalid_argument("SolveConfig: t_end must be positive");
        if (!(dt0 > 0.0)) throw std::invalid_argument("SolveConfig: dt0 must be positive");
        if (!(growth_cap > 1.0)) throw std::invalid_argument("SolveConfig: growth_cap must exceed 1");
        if (!(blowup_threshold > 0.0)) throw std::invalid_argument("SolveConfig: blowup threshold must be positive");
    }
};

enum class SolveStatus { survived, blew_up, inconclusive };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::survived: return "survived";
        case SolveStatus::blew_up: return "blew_up";
        case SolveStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SeriesPoint {
    double t = 0.0;
    double sup = 0.0;
    double boundary_sup = 0.0;
    double dt = 0.0;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::survived;
    std::string reason;
    double t_reached = 0.0;
    double final_sup = 0.0;
    double t_lower = 0.0, t_upper = 0.0;  ///< blow-up bracket
    double peak_norm = 0.0;
    int accepted = 0, rejected = 0;
    double max_accepted_dt = 0.0, last_accepted_dt = 0.0;
    std::vector<SeriesPoint> series;
    std::vector<double> final_values;
    std::vector<double> history_times;
    std::vector<std::vector<double>> history;
};

namespace detail {

inline double sup_abs(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(v));
    }
    return m;
}

template <class Grid>
double boundary_sup_values(const Grid& g, std::span<const double> u, int band) {
    double m = 0.0;
    if constexpr (std::is_same_v<Grid, BoxGrid3>) {
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < g.ntau; ++k)
                    if (g.in_boundary_band(i, j, k, band)) m = std::max(m, std::abs(u[g.index(i, j, k)]));
    } else {
        for (int j = 0; j < g.nr; ++j)
            for (int k = 0; k < g.ntau; ++k)
                if (g.in_boundary_band(j, k, band)) m = std::max(m, std::abs(u[g.index(j, k)]));
    }
    return m;
}

template <class Grid>
SolveOutcome solve_on(const ProblemSpec& spec, const Grid& g, const SolveConfig& cfg) {
    cfg.validate();
    Evolution<Grid> evo(spec, g);
    std::vector<double> u = evo.initial_values(), next(u.size());
    const int band = evo.bandwidth();
    const double dt_cap = spec.scheme == Scheme::explicit_euler ? std::min(cfg.dt0, evo.explicit_dt_bound()) : cfg.dt0;
    const double dt_min = cfg.effective_dt_min();

    SolveOutcome out;
    double t = 0.0, dt = dt_cap;
    double sup = sup_abs(u);
    out.peak_norm = sup;
    out.series.push_back({0.0, sup, boundary_sup_values(g, u, band), 0.0});
    if (cfg.store_history) {
        out.history_times.push_back(0.0);
        out.history.push_back(u);
    }

    auto finish = [&](SolveStatus s, std::string reason) {
        out.status = s;
        out.reason = std::move(reason);
        out.t_reached = t;
        out.final_sup = sup;
        out.final_values = u;
        return out;
    };

    while (t < cfg.t_end) {
        // Snap to t_end rather than leave a round-off sized final step.
        const double h = cfg.t_end - t <= dt * (1.0 + 1e-9) ? cfg.t_end - t : dt;
        const StepInfo info = evo.step(u, h, next, cfg.cg_rtol, cfg.cg_max_iter);
        if (!info.cg.converged) return finish(SolveStatus::inconclusive, "linear solver did not converge");
        const double sup_new = info.finite ? sup_abs(next) : std::numeric_limits<double>::infinity();
        const bool overflow = !std::isfinite(sup_new);
        if (overflow || (sup > 0.0 && sup_new > cfg.growth_cap * sup)) {
            // Reject and retry with a smaller step; a step that cannot shrink further brackets blow-up.
            ++out.rejected;
            dt = 0.5 * h;
            if (dt < dt_min) {
                out.t_lower = t;
                out.t_upper = t + h;
                return finish(SolveStatus::blew_up, "step size underflow");
            }
            continue;
        }
        const double growth = sup > 0.0 ? sup_new / sup : 1.0;
        std::swap(u, next);
        t += h;
        sup = sup_new;
        ++out.accepted;
        out.last_accepted_dt = h;
        out.max_accepted_dt = std::max(out.max_accepted_dt, h);
        out.peak_norm = std::max(out.peak_norm, sup);
        const double bsup = boundary_sup_values(g, u, band);
        out.series.push_back({t, sup, bsup, h});
        if (cfg.store_history) {
            out.history_times.push_back(t);
            out.history.push_back(u);
        }
        if (sup >= cfg.blowup_threshold) {
            out.t_lower = t - h;
            out.t_upper = t;
            return finish(SolveStatus::blew_up, "sup norm reached threshold");
        }
        // Without diffusion points do not interact, so the boundary carries no artefact.
        if (spec.diffusion && sup > 0.0 && bsup > cfg.boundary_tol * sup)
            return finish(SolveStatus::inconclusive, "boundary mass exceeded tolerance");
        if (growth < cfg.regrow_below) dt = std::min(dt_cap, h * cfg.regrow_factor);
    }
    return finish(SolveStatus::survived, "reached t_end");
}

}  // namespace detail

/// Integrate to t_end or blow-up.
inline SolveOutcome solve_until(const ProblemSpec& spec, const SolveConfig& cfg) {
    spec.validate();
    return std::visit([&](const auto& g) { return detail::solve_on(spec, g, cfg); }, spec.grid);
}

/// Single step on a field of either grid type.
template <class Grid>
ScalarField<Grid> step(const ScalarField<Grid>& u, double dt, const ProblemSpec& spec, StepInfo* info = nullptr) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    ProblemSpec local = spec;
    local.grid = u.grid;
    Evolution<Grid> evo(local, u.grid);
    ScalarField<Grid> out(u.grid);
    const StepInfo si = evo.step(u.values, dt, out.values);
    if (info) *info = si;
    return out;
}

}  // namespace heisenheat
