#pragma once

// Discrete sub-Laplacian on H^1 boxes and on the reduced (r, tau) cylinder.
//
// Four forms are provided:
//   direct            centred differences of the coordinate expression
//                     Delta_(x,y) + 4|z|^2 d_tautau + 4(y d_xtau - x d_ytau)
//   composed          X_h(X_h u) + Y_h(Y_h u) with centred first differences;
//                     exactly symmetric negative semidefinite under Dirichlet truncation
//   cylindrical       centred differences of d_rr + (2N-1)/r d_r + 4 r^2 d_tautau
//   cylindrical_flux  the same operator in flux form r^{1-2N} d_r(r^{2N-1} d_r) + 4 r^2 d_tautau,
//                     symmetric under the r^{2N-1}-weighted inner product (used by the solvers)
//
// Every stencil is also available pointwise on an analytic sampler so the
// group identities can be probed at arbitrary points.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisenheat/grid.hpp"
#include "heisenheat/group.hpp"

namespace heisenheat {

enum class OperatorForm { direct, composed, cylindrical, cylindrical_flux };

inline const char* to_string(OperatorForm f) {
    switch (f) {
        case OperatorForm::direct: return "direct";
        case OperatorForm::composed: return "composed";
        case OperatorForm::cylindrical: return "cylindrical";
        case OperatorForm::cylindrical_flux: return "cylindrical_flux";
    }
    return "?";
}

struct Spacing3 {
    double hx, hy, htau;
};

// ---------------------------------------------------------------- pointwise

/// Direct-form stencil at (x, y, tau) applied to an analytic u(x, y, tau).
/// `mixed_sign` multiplies the mixed-derivative terms; it exists only as a fault-injection hook.
template <class F>
double direct_stencil_at(F&& u, double x, double y, double t, Spacing3 h, double mixed_sign = 1.0) {
    const double u0 = u(x, y, t);
    const double uxx = (u(x + h.hx, y, t) - 2.0 * u0 + u(x - h.hx, y, t)) / (h.hx * h.hx);
    const double uyy = (u(x, y + h.hy, t) - 2.0 * u0 + u(x, y - h.hy, t)) / (h.hy * h.hy);
    const double utt = (u(x, y, t + h.htau) - 2.0 * u0 + u(x, y, t - h.htau)) / (h.htau * h.htau);
    const double uxt = (u(x + h.hx, y, t + h.htau) - u(x + h.hx, y, t - h.htau) - u(x - h.hx, y, t + h.htau) +
                        u(x - h.hx, y, t - h.htau)) /
                       (4.0 * h.hx * h.htau);
    const double uyt = (u(x, y + h.hy, t + h.htau) - u(x, y + h.hy, t - h.htau) - u(x, y - h.hy, t + h.htau) +
                        u(x, y - h.hy, t - h.htau)) /
                       (4.0 * h.hy * h.htau);
    return uxx + uyy + 4.0 * (x * x + y * y) * utt + mixed_sign * 4.0 * (y * uxt - x * uyt);
}

/// Composed-form stencil X_h(X_h u) + Y_h(Y_h u) at (x, y, tau).
template <class F>
double composed_stencil_at(F&& u, double x, double y, double t, Spacing3 h) {
    auto xh = [&](auto&& g) {
        return [&, g](double a, double b, double c) {
            return (g(a + h.hx, b, c) - g(a - h.hx, b, c)) / (2.0 * h.hx) +
                   2.0 * b * (g(a, b, c + h.htau) - g(a, b, c - h.htau)) / (2.0 * h.htau);
        };
    };
    auto yh = [&](auto&& g) {
        return [&, g](double a, double b, double c) {
            return (g(a, b + h.hy, c) - g(a, b - h.hy, c)) / (2.0 * h.hy) -
                   2.0 * a * (g(a, b, c + h.htau) - g(a, b, c - h.htau)) / (2.0 * h.htau);
        };
    };
    auto base = [&u](double a, double b, double c) { return u(a, b, c); };
    return xh(xh(base))(x, y, t) + yh(yh(base))(x, y, t);
}

/// Centred cylindrical stencil at (r, tau) applied to an analytic u(r, tau), even in r.
template <class F>
double cylindrical_stencil_at(F&& u, double r, double t, double dr, double dtau, int n) {
    const double u0 = u(r, t);
    const double up = u(r + dr, t);
    const double um = u(std::abs(r - dr), t);
    const double urr = (up - 2.0 * u0 + um) / (dr * dr);
    const double ur = (up - um) / (2.0 * dr);
    const double utt = (u(r, t + dtau) - 2.0 * u0 + u(r, t - dtau)) / (dtau * dtau);
    return urr + (2.0 * n - 1.0) / r * ur + 4.0 * r * r * utt;
}

/// Sub-Laplacian of a gauge-radial function phi(|eta|_H) from its radial derivatives:
/// (|z|^2 / rho^2) (phi'' + (Q-1)/rho phi').
inline double radial_profile_value(const GroupPoint& eta, double dphi, double d2phi) {
    const double rho = gauge_norm(eta);
    if (!(rho > 0.0)) throw std::invalid_argument("radial_profile_value: eta at the origin");
    const int q = 2 * eta.dim() + 2;
    return eta.horizontal_norm_sq() / (rho * rho) * (d2phi + (q - 1) / rho * dphi);
}

// ---------------------------------------------------------------- box operators

class BoxSubLaplacian {
public:
    BoxSubLaplacian(const BoxGrid3& g, OperatorForm form = OperatorForm::composed, double mixed_sign = 1.0)
        : grid_(g), form_(form), mixed_sign_(mixed_sign) {
        if (form != OperatorForm::direct && form != OperatorForm::composed)
            throw std::invalid_argument("BoxSubLaplacian: form must be direct or composed");
    }

    const BoxGrid3& grid() const { return grid_; }
    OperatorForm form() const { return form_; }
    int bandwidth() const { return form_ == OperatorForm::composed ? 2 : 1; }

    void apply(std::span<const double> u, std::span<double> out) const {
        if (form_ == OperatorForm::direct)
            apply_direct_impl(u, out);
        else
            apply_composed_impl(u, out);
    }

    BoxField apply(const BoxField& u) const {
        check_input(u);
        BoxField out(grid_);
        apply(u.values, out.values);
        return out;
    }

    /// Max over rows of the absolute row sum (Gershgorin radius plus |diagonal|).
    double gershgorin_bound() const {
        const auto& g = grid_;
        const double hx = g.hx(), hy = g.hy(), ht = g.htau();
        double best = 0.0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const double x = std::abs(g.x(i)), y = std::abs(g.y(j));
                double s;
                if (form_ == OperatorForm::direct) {
                    s = 4.0 / (hx * hx) + 4.0 / (hy * hy) + 16.0 * (x * x + y * y) / (ht * ht) +
                        4.0 * y / (hx * ht) + 4.0 * x / (hy * ht);
                } else {
                    const double ax = 1.0 / hx + 2.0 * y / ht, ay = 1.0 / hy + 2.0 * x / ht;
                    s = ax * ax + ay * ay;
                }
                best = std::max(best, s);
            }
        return best;
    }

    /// |diagonal| per node, used for Jacobi preconditioning.
    std::vector<double> diagonal() const {
        const auto& g = grid_;
        std::vector<double> d(g.size());
        const double hx = g.hx(), hy = g.hy(), ht = g.htau();
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const double x = g.x(i), y = g.y(j);
                double v;
                if (form_ == OperatorForm::direct)
                    v = -2.0 / (hx * hx) - 2.0 / (hy * hy) - 8.0 * (x * x + y * y) / (ht * ht);
                else
                    v = -1.0 / (2.0 * hx * hx) - 1.0 / (2.0 * hy * hy) - 2.0 * (x * x + y * y) / (ht * ht);
                for (int k = 0; k < g.ntau; ++k) d[g.index(i, j, k)] = v;
            }
        return d;
    }

private:
    void check_input(const BoxField& u) const {
        if (!(u.grid == grid_)) throw std::invalid_argument("BoxSubLaplacian: field on a different grid");
        if (!u.all_finite()) throw std::invalid_argument("BoxSubLaplacian: non-finite input values");
    }

    void apply_direct_impl(std::span<const double> u, std::span<double> out) const {
        const auto& g = grid_;
        const double hx = g.hx(), hy = g.hy(), ht = g.htau();
        auto at = [&](int i, int j, int k) -> double {
            if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.ntau) return 0.0;
            return u[g.index(i, j, k)];
        };
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const double x = g.x(i), y = g.y(j);
                const double ctt = 4.0 * (x * x + y * y) / (ht * ht);
                for (int k = 0; k < g.ntau; ++k) {
                    const double u0 = at(i, j, k);
                    const double uxx = (at(i + 1, j, k) - 2.0 * u0 + at(i - 1, j, k)) / (hx * hx);
                    const double uyy = (at(i, j + 1, k) - 2.0 * u0 + at(i, j - 1, k)) / (hy * hy);
                    const double utt = at(i, j, k + 1) - 2.0 * u0 + at(i, j, k - 1);
                    const double uxt = (at(i + 1, j, k + 1) - at(i + 1, j, k - 1) - at(i - 1, j, k + 1) +
                                        at(i - 1, j, k - 1)) /
                                       (4.0 * hx * ht);
                    const double uyt = (at(i, j + 1, k + 1) - at(i, j + 1, k - 1) - at(i, j - 1, k + 1) +
                                        at(i, j - 1, k - 1)) /
                                       (4.0 * hy * ht);
                    out[g.index(i, j, k)] = uxx + uyy + ctt * utt + mixed_sign_ * 4.0 * (y * uxt - x * uyt);
                }
            }
    }

    // out = X(Xu) + Y(Yu), built from two first-difference passes each.
    void apply_composed_impl(std::span<const double> u, std::span<double> out) const {
        const auto& g = grid_;
        std::vector<double> tmp(g.size());
        std::vector<double> acc(g.size());
        vector_field(u, tmp, true);
        vector_field(tmp, acc, true);
        vector_field(u, tmp, false);
        vector_field(tmp, out, false);
        for (std::size_t i = 0; i < g.size(); ++i) out[i] += acc[i];
    }

    // X_h (horizontal=true) or Y_h applied with zero padding.
    void vector_field(std::span<const double> u, std::span<double> out, bool is_x) const {
        const auto& g = grid_;
        const double hx = g.hx(), hy = g.hy(), ht = g.htau();
        auto at = [&](int i, int j, int k) -> double {
            if (i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.ntau) return 0.0;
            return u[g.index(i, j, k)];
        };
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                const double ctau = is_x ? 2.0 * g.y(j) / (2.0 * ht) : -2.0 * g.x(i) / (2.0 * ht);
                for (int k = 0; k < g.ntau; ++k) {
                    const double d = is_x ? (at(i + 1, j, k) - at(i - 1, j, k)) / (2.0 * hx)
                                          : (at(i, j + 1, k) - at(i, j - 1, k)) / (2.0 * hy);
                    out[g.index(i, j, k)] = d + ctau * (at(i, j, k + 1) - at(i, j, k - 1));
                }
            }
    }

    BoxGrid3 grid_;
    OperatorForm form_;
    double mixed_sign_;
};

// ---------------------------------------------------------------- cylinder operators

class CylSubLaplacian {
public:
    explicit CylSubLaplacian(const CylGrid& g, OperatorForm form = OperatorForm::cylindrical_flux)
        : grid_(g), form_(form) {
        if (form != OperatorForm::cylindrical && form != OperatorForm::cylindrical_flux)
            throw std::invalid_argument("CylSubLaplacian: form must be cylindrical or cylindrical_flux");
        const int nr = g.nr;
        const double dr = g.dr(), dt = g.dtau();
        const int k = 2 * g.n - 1;
        plus_.resize(nr);
        minus_.resize(nr);
        ctau_.resize(nr);
        weight_.resize(nr);
        for (int j = 0; j < nr; ++j) {
            const double r = g.r(j);
            weight_[j] = std::pow(r, k);
            ctau_[j] = 4.0 * r * r / (dt * dt);
            if (form == OperatorForm::cylindrical_flux) {
                plus_[j] = std::pow((j + 1) * dr, k) / (weight_[j] * dr * dr);
                minus_[j] = j == 0 ? 0.0 : std::pow(j * dr, k) / (weight_[j] * dr * dr);
            } else {
                // u_rr + (2N-1)/r u_r; the j=0 ghost mirrors u_0 and is folded in below.
                plus_[j] = 1.0 / (dr * dr) + k / (r * 2.0 * dr);
                minus_[j] = 1.0 / (dr * dr) - k / (r * 2.0 * dr);
            }
        }
    }

    const CylGrid& grid() const { return grid_; }
    OperatorForm form() const { return form_; }
    int bandwidth() const { return 1; }

    /// r_j^{2N-1}; the operator is symmetric under this weight in flux form.
    const std::vector<double>& radial_weights() const { return weight_; }
    const std::vector<double>& plus() const { return plus_; }
    const std::vector<double>& minus() const { return minus_; }
    const std::vector<double>& ctau() const { return ctau_; }

    void apply(std::span<const double> u, std::span<double> out) const {
        const auto& g = grid_;
        const int nr = g.nr, nt = g.ntau;
        const bool flux = form_ == OperatorForm::cylindrical_flux;
        for (int j = 0; j < nr; ++j) {
            const double* uc = u.data() + static_cast<std::size_t>(j) * nt;
            const double* up = j + 1 < nr ? uc + nt : nullptr;
            const double* um = j > 0 ? uc - nt : (flux ? nullptr : uc);
            double* o = out.data() + static_cast<std::size_t>(j) * nt;
            const double cp = plus_[j], cm = minus_[j], ct = ctau_[j];
            for (int k = 0; k < nt; ++k) {
                const double u0 = uc[k];
                const double vp = up ? up[k] : 0.0;
                const double vm = um ? um[k] : 0.0;
                const double tp = k + 1 < nt ? uc[k + 1] : 0.0;
                const double tm = k > 0 ? uc[k - 1] : 0.0;
                o[k] = cp * (vp - u0) - cm * (u0 - vm) + ct * (tp - 2.0 * u0 + tm);
            }
        }
    }

    CylField apply(const CylField& u) const {
        if (!(u.grid == grid_)) throw std::invalid_argument("CylSubLaplacian: field on a different grid");
        if (!u.all_finite()) throw std::invalid_argument("CylSubLaplacian: non-finite input values");
        CylField out(grid_);
        apply(u.values, out.values);
        return out;
    }

    double gershgorin_bound() const {
        double best = 0.0;
        for (int j = 0; j < grid_.nr; ++j) {
            double diag = plus_[j] + minus_[j] + 2.0 * ctau_[j];
            double off = std::abs(plus_[j]) + std::abs(minus_[j]) + 2.0 * ctau_[j];
            if (form_ == OperatorForm::cylindrical && j == 0) {
                diag = plus_[j] + 2.0 * ctau_[j];
                off = std::abs(plus_[j]) + 2.0 * ctau_[j];
            }
            best = std::max(best, diag + off);
        }
        return best;
    }

private:
    CylGrid grid_;
    OperatorForm form_;
    std::vector<double> plus_, minus_, ctau_, weight_;
};

template <class Grid>
struct SubLaplacianFor;
template <>
struct SubLaplacianFor<BoxGrid3> {
    using type = BoxSubLaplacian;
    static constexpr OperatorForm default_form = OperatorForm::composed;
};
template <>
struct SubLaplacianFor<CylGrid> {
    using type = CylSubLaplacian;
    static constexpr OperatorForm default_form = OperatorForm::cylindrical_flux;
};

template <class Grid>
using DiscreteSubLaplacian = typename SubLaplacianFor<Grid>::type;

inline BoxField apply_direct(const BoxField& u, double mixed_sign = 1.0) {
    return BoxSubLaplacian(u.grid, OperatorForm::direct, mixed_sign).apply(u);
}
inline BoxField apply_composed(const BoxField& u) {
    return BoxSubLaplacian(u.grid, OperatorForm::composed).apply(u);
}
inline CylField apply_cyl(const CylField& u) {
    return CylSubLaplacian(u.grid, OperatorForm::cylindrical).apply(u);
}
inline CylField apply_cyl_flux(const CylField& u) {
    return CylSubLaplacian(u.grid, OperatorForm::cylindrical_flux).apply(u);
}

// ---------------------------------------------------------------- identity residuals

struct IdentityReport {
    double left_invariance = 0.0;  ///< sup |L(u(. o eta')) - (Lu)(. o eta')|
    double homogeneity = 0.0;      ///< sup |L(u o delta_l) - l^2 (Lu) o delta_l|
    std::size_t evaluated = 0;     ///< points where both residuals were computed
    std::size_t left_flagged = 0;  ///< points whose shifted stencil escaped the box
    std::size_t dilation_flagged = 0;
};

/// Probe left invariance and dilation homogeneity of the pointwise stencil at the
/// nodes of `probe` whose images stay inside `domain` (including stencil reach).
/// `u` is an analytic function of (x, y, tau) for N = 1.
template <class F>
IdentityReport identity_residuals(F&& u, const GroupPoint& eta_shift, double lambda, const BoxGrid3& probe,
                                  const BoxGrid3& domain, Spacing3 h, OperatorForm form = OperatorForm::direct,
                                  double mixed_sign = 1.0) {
    if (eta_shift.dim() != 1) throw std::invalid_argument("identity_residuals: box probes require N = 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("identity_residuals: lambda must be positive");
    const int reach = form == OperatorForm::composed ? 2 : 1;
    auto stencil = [&](auto&& fn, double x, double y, double t) {
        if (form == OperatorForm::composed) return composed_stencil_at(fn, x, y, t, h);
        return direct_stencil_at(fn, x, y, t, h, mixed_sign);
    };
    auto inside = [&](double x, double y, double t, double sx, double sy, double st) {
        return std::abs(x) + reach * sx <= domain.half_x && std::abs(y) + reach * sy <= domain.half_y &&
               std::abs(t) + reach * st <= domain.half_tau;
    };
    const double a = eta_shift.x()[0], b = eta_shift.y()[0], c = eta_shift.tau();
    // Translation as in the invariance identity L(u(eta o eta')) = (Lu)(eta o eta').
    auto shifted = [&](double x, double y, double t) { return u(x + a, y + b, t + c + 2.0 * (x * b - a * y)); };
    auto dilated = [&](double x, double y, double t) { return u(lambda * x, lambda * y, lambda * lambda * t); };

    IdentityReport rep;
    for (int i = 0; i < probe.nx; ++i)
        for (int j = 0; j < probe.ny; ++j)
            for (int k = 0; k < probe.ntau; ++k) {
                const double x = probe.x(i), y = probe.y(j), t = probe.tau(k);
                if (!inside(x, y, t, h.hx, h.hy, h.htau)) {
                    ++rep.left_flagged;
                    ++rep.dilation_flagged;
                    continue;
                }
                // image points of the left translation and of the dilation
                const double sx = x + a, sy = y + b, st = t + c + 2.0 * (x * b - a * y);
                const double dx = lambda * x, dy = lambda * y, dt = lambda * lambda * t;
                // the shifted stencil reaches tau offsets up to htau + 2|a| hy + 2|b| hx
                const double st_reach = h.htau + 2.0 * (std::abs(a) * h.hy + std::abs(b) * h.hx);
                const bool left_ok = inside(sx, sy, st, h.hx, h.hy, std::max(h.htau, st_reach));
                const bool dil_ok = inside(dx, dy, dt, lambda * h.hx, lambda * h.hy, lambda * lambda * h.htau);
                if (!left_ok) ++rep.left_flagged;
                if (!dil_ok) ++rep.dilation_flagged;
                if (!left_ok || !dil_ok) continue;
                ++rep.evaluated;
                const double li = stencil(shifted, x, y, t) - stencil(u, sx, sy, st);
                const double ho = stencil(dilated, x, y, t) - lambda * lambda * stencil(u, dx, dy, dt);
                rep.left_invariance = std::max(rep.left_invariance, std::abs(li));
                rep.homogeneity = std::max(rep.homogeneity, std::abs(ho));
            }
    return rep;
}

}  // namespace heisenheat
