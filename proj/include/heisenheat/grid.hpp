#pragma once

// Uniform grids on the full H^1 box and on the reduced (r, tau) half-plane,
// grid functions, midpoint quadrature and norms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisenheat/group.hpp"

namespace heisenheat {

/// Surface measure of the unit sphere in R^{2N}: 2 pi^N / Gamma(N).
inline double sphere_measure(int n) {
    return 2.0 * std::pow(std::numbers::pi, n) / std::tgamma(static_cast<double>(n));
}

/// Pairwise summation with a fixed split order; results do not depend on how
/// callers partition work.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 16) {
        double s = 0.0;
        for (double e : v) s += e;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

/// Cell-centred uniform box [-Lx,Lx] x [-Ly,Ly] x [-Ltau,Ltau] for H^1.
/// Node (i,j,k) sits at the centre of its cell; storage is row-major with tau fastest.
struct BoxGrid3 {
    double half_x = 1.0, half_y = 1.0, half_tau = 1.0;
    int nx = 5, ny = 5, ntau = 5;

    BoxGrid3() = default;
    BoxGrid3(double hx_half, double hy_half, double htau_half, int px, int py, int ptau)
        : half_x(hx_half), half_y(hy_half), half_tau(htau_half), nx(px), ny(py), ntau(ptau) {
        validate();
    }

    void validate() const {
        if (!(half_x > 0 && half_y > 0 && half_tau > 0))
            throw std::invalid_argument("BoxGrid3: half extents must be positive");
        if (nx < 5 || ny < 5 || ntau < 5)
            throw std::invalid_argument("BoxGrid3: need at least 5 points per axis");
    }

    static constexpr int heisenberg_n() { return 1; }
    double hx() const { return 2.0 * half_x / nx; }
    double hy() const { return 2.0 * half_y / ny; }
    double htau() const { return 2.0 * half_tau / ntau; }
    double x(int i) const { return -half_x + (i + 0.5) * hx(); }
    double y(int j) const { return -half_y + (j + 0.5) * hy(); }
    double tau(int k) const { return -half_tau + (k + 0.5) * htau(); }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny * ntau; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * ny + j) * ntau + k;
    }
    double cell_volume() const { return hx() * hy() * htau(); }
    double weight(std::size_t) const { return cell_volume(); }

    /// True if node lies within `band` nodes of any face.
    bool in_boundary_band(int i, int j, int k, int band) const {
        return i < band || j < band || k < band || i >= nx - band || j >= ny - band || k >= ntau - band;
    }

    friend bool operator==(const BoxGrid3&, const BoxGrid3&) = default;
};

/// Reduced cylinder (r, tau) for partially symmetric functions on H^N, with
/// cell-centred radial nodes r_j = (j + 1/2) dr so no node sits on the axis.
struct CylGrid {
    int n = 1;
    double r_max = 1.0, tau_half = 1.0;
    int nr = 5, ntau = 5;

    CylGrid() = default;
    CylGrid(int heisenberg_n, double rmax, double tau_half_extent, int pr, int ptau)
        : n(heisenberg_n), r_max(rmax), tau_half(tau_half_extent), nr(pr), ntau(ptau) {
        validate();
    }

    void validate() const {
        if (n < 1) throw std::invalid_argument("CylGrid: N must be >= 1");
        if (!(r_max > 0 && tau_half > 0)) throw std::invalid_argument("CylGrid: extents must be positive");
        if (nr < 5 || ntau < 5) throw std::invalid_argument("CylGrid: need at least 5 points per axis");
    }

    int heisenberg_n() const { return n; }
    double dr() const { return r_max / nr; }
    double dtau() const { return 2.0 * tau_half / ntau; }
    double r(int j) const { return (j + 0.5) * dr(); }
    double tau(int k) const { return -tau_half + (k + 0.5) * dtau(); }
    std::size_t size() const { return static_cast<std::size_t>(nr) * ntau; }
    std::size_t index(int j, int k) const { return static_cast<std::size_t>(j) * ntau + k; }

    /// r^{2N-1}, the radial part of the reduced Jacobian.
    double radial_weight(int j) const { return std::pow(r(j), 2 * n - 1); }
    /// Quadrature weight sigma_{2N} r_j^{2N-1} dr dtau.
    double weight(std::size_t idx) const {
        const int j = static_cast<int>(idx / ntau);
        return sphere_measure(n) * radial_weight(j) * dr() * dtau();
    }

    /// Only the outer radius and the two tau faces are boundaries; the axis is not.
    bool in_boundary_band(int j, int k, int band) const {
        return j >= nr - band || k < band || k >= ntau - band;
    }

    friend bool operator==(const CylGrid&, const CylGrid&) = default;
};

/// Grid function. Values are finite unless the owner flags the post-blow-up state.
template <class Grid>
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
    ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw std::invalid_argument("ScalarField: value count " + std::to_string(values.size()) +
                                        " does not match grid size " + std::to_string(grid.size()));
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const {
        return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
    }
};

using BoxField = ScalarField<BoxGrid3>;
using CylField = ScalarField<CylGrid>;

/// Sample a partially symmetric function g(r, tau) on the box.
template <class Fn>
BoxField sample_rt(const BoxGrid3& g, Fn&& fn) {
    BoxField f(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double r = std::hypot(g.x(i), g.y(j));
            for (int k = 0; k < g.ntau; ++k) f[g.index(i, j, k)] = fn(r, g.tau(k));
        }
    return f;
}

template <class Fn>
CylField sample_rt(const CylGrid& g, Fn&& fn) {
    CylField f(g);
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k) f[g.index(j, k)] = fn(g.r(j), g.tau(k));
    return f;
}

/// Cell averages of g(r, tau) under the weight r^{2N-1}, so that the discrete integral of the
/// result equals a sub-cell midpoint quadrature of g. Cells near the origin, where a gauge-scale
/// feature can be smaller than a cell, are subdivided more finely.
template <class Fn>
CylField cell_average_rt(const CylGrid& g, Fn&& fn, int max_sub = 64) {
    CylField f(g);
    const double dr = g.dr(), dt = g.dtau();
    const int k = 2 * g.n - 1;
    for (int j = 0; j < g.nr; ++j) {
        const double r_lo = j * dr;
        for (int m = 0; m < g.ntau; ++m) {
            const double t_c = g.tau(m);
            const double t_lo = std::max(0.0, std::abs(t_c) - 0.5 * dt);
            const double rho_min = std::pow(r_lo * r_lo * r_lo * r_lo + t_lo * t_lo, 0.25);
            const double hr = std::max(0.02, rho_min / 8.0), ht = std::max(0.02, rho_min * rho_min / 8.0);
            const int sr = std::clamp(static_cast<int>(std::ceil(dr / hr)), 1, max_sub);
            const int st = std::clamp(static_cast<int>(std::ceil(dt / ht)), 1, max_sub);
            double num = 0.0;
            for (int a = 0; a < sr; ++a) {
                const double r = r_lo + (a + 0.5) * dr / sr;
                const double wr = std::pow(r, k);
                for (int b = 0; b < st; ++b) num += wr * fn(r, t_c - 0.5 * dt + (b + 0.5) * dt / st);
            }
            // Divide by the centre weight used by integrate_cyl.
            f[g.index(j, m)] = num / (sr * st) / g.radial_weight(j);
        }
    }
    return f;
}

/// Sample an arbitrary function u(x, y, tau) on the box.
template <class Fn>
BoxField sample_xyt(const BoxGrid3& g, Fn&& fn) {
    BoxField f(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.ntau; ++k) f[g.index(i, j, k)] = fn(g.x(i), g.y(j), g.tau(k));
    return f;
}

template <class Grid>
double linf_norm(const ScalarField<Grid>& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::abs(v));
    return m;
}

/// Midpoint rule: sum of values times cell volume.
inline double integrate_box(const BoxField& u) {
    return pairwise_sum(u.values) * u.grid.cell_volume();
}

/// sigma_{2N} * sum u_jk r_j^{2N-1} dr dtau.
inline double integrate_cyl(const CylField& u) {
    const auto& g = u.grid;
    std::vector<double> rows(g.nr);
    for (int j = 0; j < g.nr; ++j)
        rows[j] = g.radial_weight(j) *
                  pairwise_sum(std::span<const double>(u.values).subspan(g.index(j, 0), g.ntau));
    return sphere_measure(g.n) * pairwise_sum(rows) * g.dr() * g.dtau();
}

inline double integrate(const BoxField& u) { return integrate_box(u); }
inline double integrate(const CylField& u) { return integrate_cyl(u); }

namespace detail {
template <class Grid>
void require_same_grid(const ScalarField<Grid>& u, const ScalarField<Grid>& v) {
    if (!(u.grid == v.grid) || u.size() != v.size())
        throw std::invalid_argument("inner_product: fields live on different grids");
}
}  // namespace detail

/// Quadrature-weighted <u, v>, consistent with integrate().
template <class Grid>
double inner_product(const ScalarField<Grid>& u, const ScalarField<Grid>& v) {
    detail::require_same_grid(u, v);
    ScalarField<Grid> w(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] * v[i];
    return integrate(w);
}

template <class Grid>
double l2_norm(const ScalarField<Grid>& u) {
    return std::sqrt(std::max(0.0, inner_product(u, u)));
}

/// Discrete L^r norm, r >= 1.
template <class Grid>
double lr_norm(const ScalarField<Grid>& u, double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("lr_norm: r must be >= 1");
    ScalarField<Grid> w(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::pow(std::abs(u[i]), r);
    return std::pow(integrate(w), 1.0 / r);
}

/// Sup of |u| over nodes within `band` nodes of the truncation boundary.
inline double boundary_sup(const BoxField& u, int band) {
    const auto& g = u.grid;
    double m = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.ntau; ++k)
                if (g.in_boundary_band(i, j, k, band)) m = std::max(m, std::abs(u[g.index(i, j, k)]));
    return m;
}

inline double boundary_sup(const CylField& u, int band) {
    const auto& g = u.grid;
    double m = 0.0;
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k)
            if (g.in_boundary_band(j, k, band)) m = std::max(m, std::abs(u[g.index(j, k)]));
    return m;
}

}  // namespace heisenheat
