#pragma once

// Identity and convergence checks for the group algebra and the discrete operators.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "heisenheat/grid.hpp"
#include "heisenheat/group.hpp"
#include "heisenheat/sublaplacian.hpp"

namespace heisenheat {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

struct VerifyConfig {
    unsigned seed = 12345;
    double fault_mixed_sign = 1.0;  ///< -1 flips the mixed-derivative terms of the direct form
    int pairs = 100;
    int operator_points = 16;  ///< per axis, for the self-adjointness grid
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
};

/// Observed orders log2(e_i / e_{i+1}) under successive halving.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
    return out;
}

inline bool orders_within(const std::vector<double>& orders, double lo, double hi) {
    return !orders.empty() &&
           std::all_of(orders.begin(), orders.end(), [&](double o) { return std::isfinite(o) && o >= lo && o <= hi; });
}

namespace detail {

inline std::string join_orders(const std::vector<double>& o) {
    std::string s;
    for (double v : o) {
        if (!s.empty()) s += ' ';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", v);
        s += buf;
    }
    return s;
}

inline double min_order(const std::vector<double>& o) {
    return o.empty() ? 0.0 : *std::min_element(o.begin(), o.end());
}

inline CheckResult order_check(std::string name, const std::vector<double>& errors, double lo = 1.8, double hi = 2.2) {
    const auto o = observed_orders(errors);
    CheckResult c;
    c.name = std::move(name);
    c.value = min_order(o);
    c.tolerance = lo;
    c.passed = orders_within(o, lo, hi);
    c.detail = "orders " + join_orders(o) + " (expected in [" + std::to_string(lo) + ", " + std::to_string(hi) + "])";
    return c;
}

// Not rotation invariant in (x, y), so the mixed-derivative terms do not vanish on it.
inline double gaussian3(double x, double y, double t) {
    const double dx = x - 0.3, dt = t - 0.2;
    return std::exp(-dx * dx - 1.5 * y * y - 0.5 * dt * dt);
}

}  // namespace detail

/// Sup error of the direct form on |eta|_H^4 against 24 (x^2 + y^2), interior nodes only.
inline double direct_quartic_error(int n, double mixed_sign = 1.0) {
    const BoxGrid3 g{2.0, 2.0, 4.0, n, n, n};
    const auto u = sample_xyt(g, [](double x, double y, double t) {
        const double a = x * x + y * y;
        return a * a + t * t;
    });
    const auto l = apply_direct(u, mixed_sign);
    double e = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (g.in_boundary_band(i, j, k, 1)) continue;
                const double x = g.x(i), y = g.y(j);
                e = std::max(e, std::abs(l[g.index(i, j, k)] - 24.0 * (x * x + y * y)));
            }
    return e;
}

/// Left-invariance and homogeneity residuals of the direct stencil on a Gaussian, for spacing h.
inline IdentityReport gaussian_identity(double h, const GroupPoint& shift, double lambda, double mixed_sign = 1.0) {
    const BoxGrid3 probe{1.0, 1.0, 1.0, 5, 5, 5};
    const BoxGrid3 domain{6.0, 6.0, 12.0, 5, 5, 5};
    return identity_residuals([](double x, double y, double t) { return detail::gaussian3(x, y, t); }, shift, lambda,
                              probe, domain, Spacing3{h, h, h}, OperatorForm::direct, mixed_sign);
}

/// Max over 5^3 probe points of |direct - composed| stencils on the Gaussian.
inline double cross_form_difference(double h, double mixed_sign = 1.0) {
    const BoxGrid3 probe{1.0, 1.0, 1.0, 5, 5, 5};
    double e = 0.0;
    for (int i = 0; i < probe.nx; ++i)
        for (int j = 0; j < probe.ny; ++j)
            for (int k = 0; k < probe.ntau; ++k) {
                const double x = probe.x(i), y = probe.y(j), t = probe.tau(k);
                const double d = direct_stencil_at(detail::gaussian3, x, y, t, Spacing3{h, h, h}, mixed_sign);
                const double c = composed_stencil_at(detail::gaussian3, x, y, t, Spacing3{h, h, h});
                e = std::max(e, std::abs(d - c));
            }
    return e;
}

/// Max over probe points of |cylindrical - direct| on a partially symmetric Gaussian (N = 1).
inline double cyl_direct_difference(double h) {
    auto g_rt = [](double r, double t) { return std::exp(-r * r - 0.5 * t * t); };
    auto g_xyt = [&](double x, double y, double t) { return g_rt(std::hypot(x, y), t); };
    double e = 0.0;
    for (double r : {0.5, 0.8, 1.1})
        for (double t : {-0.7, 0.0, 0.4}) {
            const double c = cylindrical_stencil_at(g_rt, r, t, h, h, 1);
            const double d = direct_stencil_at(g_xyt, r, 0.0, t, Spacing3{h, h, h});
            e = std::max(e, std::abs(c - d));
        }
    return e;
}

/// Sup interior error of the reduced centred form on r^4 + tau^2 against (8N + 16) r^2.
inline double cyl_quartic_error(int n_heis, int nr) {
    const CylGrid g{n_heis, 2.0, 2.0, nr, 2 * nr};
    const auto u = sample_rt(g, [](double r, double t) { return r * r * r * r + t * t; });
    const auto l = apply_cyl(u);
    double e = 0.0;
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k) {
            if (g.in_boundary_band(j, k, 1)) continue;
            const double r = g.r(j);
            e = std::max(e, std::abs(l[g.index(j, k)] - (8.0 * n_heis + 16.0) * r * r));
        }
    return e;
}

inline VerifyReport run_verify_suite(const VerifyConfig& cfg) {
    VerifyReport rep;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    auto random_point = [&](int n) {
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = coord(rng);
        for (auto& v : y) v = coord(rng);
        return GroupPoint(x, y, coord(rng));
    };

    // Group laws.
    {
        double assoc = 0.0, ident = 0.0, homog = 0.0, sym = 0.0;
        for (int n : {1, 2, 3})
            for (int s = 0; s < 200; ++s) {
                const auto a = random_point(n), b = random_point(n), c = random_point(n);
                const auto l = group_mul(group_mul(a, b), c), r = group_mul(a, group_mul(b, c));
                const double scale = 1.0 + std::abs(l.tau());
                assoc = std::max(assoc, std::abs(l.tau() - r.tau()) / scale);
                for (int i = 0; i < n; ++i)
                    assoc = std::max({assoc, std::abs(l.x()[i] - r.x()[i]), std::abs(l.y()[i] - r.y()[i])});
                const auto e = GroupPoint::identity(n);
                const auto ai = group_mul(a, group_inverse(a));
                const auto ea = group_mul(e, a);
                ident = std::max({ident, gauge_norm(ai), std::abs(ea.tau() - a.tau())});
                const double lam = std::exp(coord(rng));
                homog = std::max(homog, std::abs(gauge_norm(dilate(lam, a)) - lam * gauge_norm(a)) / (lam * gauge_norm(a)));
                sym = std::max(sym, std::abs(gauge_norm(a) - gauge_norm(group_inverse(a))));
            }
        rep.checks.push_back({"group_associativity", assoc, 1e-12, assoc <= 1e-12, "200 random triples per N in {1,2,3}"});
        rep.checks.push_back({"group_identity_inverse", ident, 1e-12, ident <= 1e-12, "a o a^-1 and e o a"});
        rep.checks.push_back({"gauge_homogeneity", homog, 1e-12, homog <= 1e-12, "relative |d_l a| - l |a|"});
        rep.checks.push_back({"gauge_symmetry", sym, 0.0, sym == 0.0, "|a| = |a^-1| exactly"});
    }

    // Consistency order of the direct form on the quartic gauge power.
    {
        std::vector<double> errs;
        for (int n : {16, 32, 64, 128}) errs.push_back(direct_quartic_error(n, cfg.fault_mixed_sign));
        rep.checks.push_back(detail::order_check("direct_quartic_order", errs));
    }

    // Self-adjointness and semidefiniteness of the composed form.
    {
        const int n = cfg.operator_points;
        const BoxGrid3 g{2.0, 2.0, 4.0, n, n, n};
        const BoxSubLaplacian op(g, OperatorForm::composed);
        std::uniform_real_distribution<double> val(-1.0, 1.0);
        const int margin = op.bandwidth() + 1;
        auto random_field = [&] {
            BoxField u(g);
            for (int i = margin; i < n - margin; ++i)
                for (int j = margin; j < n - margin; ++j)
                    for (int k = margin; k < n - margin; ++k) u[g.index(i, j, k)] = val(rng);
            return u;
        };
        double asym = 0.0, semidef = -INFINITY;
        for (int s = 0; s < cfg.pairs; ++s) {
            const auto u = random_field(), v = random_field();
            const auto lu = op.apply(u), lv = op.apply(v);
            const double nu = l2_norm(u), nv = l2_norm(v);
            asym = std::max(asym, std::abs(inner_product(lu, v) - inner_product(u, lv)) / (nu * nv));
            semidef = std::max(semidef, inner_product(lu, u) / (nu * nu));
        }
        rep.checks.push_back({"composed_self_adjoint", asym, 1e-10, asym <= 1e-10,
                              std::to_string(cfg.pairs) + " random interior-supported pairs"});
        rep.checks.push_back({"composed_negative_semidefinite", semidef, 0.0, semidef <= 1e-12, "max <Lu,u>/|u|^2"});
    }

    // Trivial identities: lambda = 1, eta' = e.
    {
        const auto r = gaussian_identity(0.1, GroupPoint::identity(1), 1.0, cfg.fault_mixed_sign);
        const double v = std::max(r.left_invariance, r.homogeneity);
        rep.checks.push_back({"identity_trivial_exact", v, 0.0, v == 0.0, "lambda = 1, eta' = e"});
    }

    // Left invariance and homogeneity under refinement.
    {
        std::vector<double> li, ho;
        for (double h : {0.2, 0.1, 0.05, 0.025}) {
            li.push_back(gaussian_identity(h, GroupPoint(0.5, 0.0, 0.0), 1.0, cfg.fault_mixed_sign).left_invariance);
            ho.push_back(gaussian_identity(h, GroupPoint::identity(1), 2.0, cfg.fault_mixed_sign).homogeneity);
        }
        rep.checks.push_back(detail::order_check("left_invariance_order", li));
        rep.checks.push_back(detail::order_check("homogeneity_order", ho));
    }

    // Cross-form agreement.
    {
        std::vector<double> dc, cd;
        for (double h : {0.2, 0.1, 0.05, 0.025}) {
            dc.push_back(cross_form_difference(h, cfg.fault_mixed_sign));
            cd.push_back(cyl_direct_difference(h));
        }
        rep.checks.push_back(detail::order_check("cross_form_direct_composed", dc));
        rep.checks.push_back(detail::order_check("cross_form_cylindrical_direct", cd));
    }

    // Reduced form: exactness on r^2 and order on r^4 + tau^2.
    {
        for (int nh : {1, 2}) {
            const CylGrid g{nh, 2.0, 2.0, 32, 64};
            const auto l = apply_cyl(sample_rt(g, [](double r, double) { return r * r; }));
            double e = 0.0;
            for (int j = 0; j < g.nr - 1; ++j)
                for (int k = 1; k < g.ntau - 1; ++k) e = std::max(e, std::abs(l[g.index(j, k)] - 4.0 * nh));
            rep.checks.push_back({"cylindrical_r2_exact_N" + std::to_string(nh), e, 1e-9, e <= 1e-9, "L r^2 = 4N"});
            std::vector<double> errs;
            for (int nr : {16, 32, 64}) errs.push_back(cyl_quartic_error(nh, nr));
            rep.checks.push_back(detail::order_check("cylindrical_quartic_order_N" + std::to_string(nh), errs));
        }
    }

    // Degeneracy on the centre and the gauge-radial formula.
    {
        auto tau_only = [](double, double, double t) { return std::exp(-t * t); };
        double e = 0.0;
        for (double t : {-1.0, -0.3, 0.0, 0.6})
            e = std::max(e, std::abs(direct_stencil_at(tau_only, 0.0, 0.0, t, Spacing3{0.1, 0.1, 0.1}, cfg.fault_mixed_sign)));
        rep.checks.push_back({"center_degeneracy", e, 0.0, e == 0.0, "tau-only field on the axis"});
        const double v = radial_profile_value(GroupPoint(1.0, 0.0, 0.0), 4.0, 12.0);
        rep.checks.push_back({"radial_profile_quartic", std::abs(v - 24.0), 1e-12, std::abs(v - 24.0) <= 1e-12,
                              "phi = rho^4 at (1,0,0)"});
    }
    return rep;
}

}  // namespace heisenheat
