#pragma once

// Residual of the space-time weak formulation
//   int int |u|^p psi + int u0 psi(0) + int int f psi + int int u psi_t + int int u L psi = 0
// evaluated from stored time slices: left-endpoint rule in time, midpoint in space.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "heisenheat/grid.hpp"

namespace heisenheat {

/// Test function sample: value, time derivative and sub-Laplacian.
struct PsiSample {
    double value = 0.0, dt = 0.0, lap = 0.0;
};

using PsiSampler = std::function<PsiSample(double t, double r, double tau)>;
using ForcingSampler = std::function<double(double t, double r, double tau)>;

struct WeakResidual {
    double residual = 0.0;
    double nonlinear = 0.0, initial = 0.0, forcing = 0.0, time_term = 0.0, space_term = 0.0;
    /// Sum of absolute term sizes, a natural scale for the residual.
    double scale() const {
        return std::abs(nonlinear) + std::abs(initial) + std::abs(forcing) + std::abs(time_term) + std::abs(space_term);
    }
};

namespace detail {

struct NodeTable {
    std::vector<double> r, tau, w;
    std::vector<char> boundary;
};

inline NodeTable node_table(const CylGrid& g, int band) {
    NodeTable t;
    t.r.resize(g.size());
    t.tau.resize(g.size());
    t.w.resize(g.size());
    t.boundary.resize(g.size());
    const double c = sphere_measure(g.n) * g.dr() * g.dtau();
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k) {
            const auto i = g.index(j, k);
            t.r[i] = g.r(j);
            t.tau[i] = g.tau(k);
            t.w[i] = c * g.radial_weight(j);
            t.boundary[i] = g.in_boundary_band(j, k, band);
        }
    return t;
}

inline NodeTable node_table(const BoxGrid3& g, int band) {
    NodeTable t;
    t.r.resize(g.size());
    t.tau.resize(g.size());
    t.w.assign(g.size(), g.cell_volume());
    t.boundary.resize(g.size());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.ntau; ++k) {
                const auto a = g.index(i, j, k);
                t.r[a] = std::hypot(g.x(i), g.y(j));
                t.tau[a] = g.tau(k);
                t.boundary[a] = g.in_boundary_band(i, j, k, band);
            }
    return t;
}

}  // namespace detail

/// `times` are increasing slice times starting at 0 and ending at the terminal time T;
/// `slices[m]` holds u(times[m]) on `grid`. psi must vanish at T and near the grid boundary.
template <class Grid>
WeakResidual weak_pairing_residual(const Grid& grid, const std::vector<double>& times,
                                   const std::vector<std::vector<double>>& slices, double p, const PsiSampler& psi,
                                   const ForcingSampler& f, int band = 1) {
    if (times.size() < 2 || times.size() != slices.size())
        throw std::invalid_argument("weak_pairing_residual: need at least two slices matching the time list");
    if (times.front() != 0.0) throw std::invalid_argument("weak_pairing_residual: history must start at t = 0");
    for (std::size_t m = 0; m + 1 < times.size(); ++m)
        if (!(times[m + 1] > times[m])) throw std::invalid_argument("weak_pairing_residual: times must increase");
    const auto nodes = detail::node_table(grid, band);
    const std::size_t n = grid.size();
    for (const auto& s : slices)
        if (s.size() != n) throw std::invalid_argument("weak_pairing_residual: slice size differs from grid");

    // Support and terminal checks.
    double psi_scale = 0.0, psi_terminal = 0.0, psi_edge = 0.0;
    const double t_final = times.back();
    for (std::size_t m = 0; m < times.size(); ++m)
        for (std::size_t i = 0; i < n; ++i) {
            const double v = std::abs(psi(times[m], nodes.r[i], nodes.tau[i]).value);
            psi_scale = std::max(psi_scale, v);
            if (nodes.boundary[i]) psi_edge = std::max(psi_edge, v);
        }
    for (std::size_t i = 0; i < n; ++i)
        psi_terminal = std::max(psi_terminal, std::abs(psi(t_final, nodes.r[i], nodes.tau[i]).value));
    if (psi_terminal > 1e-12 * psi_scale)
        throw std::invalid_argument("weak_pairing_residual: psi does not vanish at the terminal time");
    if (psi_edge > 1e-12 * psi_scale)
        throw std::invalid_argument("weak_pairing_residual: psi is not supported inside the grid");

    WeakResidual out;
    std::vector<double> nl(n), fo(n), tt(n), sp(n);
    std::vector<double> rows_nl, rows_fo, rows_tt, rows_sp;
    for (std::size_t m = 0; m + 1 < times.size(); ++m) {
        const double t = times[m], dt = times[m + 1] - times[m];
        const auto& u = slices[m];
        for (std::size_t i = 0; i < n; ++i) {
            const PsiSample s = psi(t, nodes.r[i], nodes.tau[i]);
            const double w = nodes.w[i] * dt;
            nl[i] = w * std::pow(std::abs(u[i]), p) * s.value;
            fo[i] = w * f(t, nodes.r[i], nodes.tau[i]) * s.value;
            tt[i] = w * u[i] * s.dt;
            sp[i] = w * u[i] * s.lap;
        }
        rows_nl.push_back(pairwise_sum(nl));
        rows_fo.push_back(pairwise_sum(fo));
        rows_tt.push_back(pairwise_sum(tt));
        rows_sp.push_back(pairwise_sum(sp));
    }
    std::vector<double> init(n);
    for (std::size_t i = 0; i < n; ++i) init[i] = nodes.w[i] * slices[0][i] * psi(0.0, nodes.r[i], nodes.tau[i]).value;
    out.nonlinear = pairwise_sum(rows_nl);
    out.forcing = pairwise_sum(rows_fo);
    out.time_term = pairwise_sum(rows_tt);
    out.space_term = pairwise_sum(rows_sp);
    out.initial = pairwise_sum(init);
    out.residual = std::abs(out.nonlinear + out.initial + out.forcing + out.time_term + out.space_term);
    return out;
}

}  // namespace heisenheat
