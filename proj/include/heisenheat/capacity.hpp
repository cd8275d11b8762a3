#pragma once

// Capacity integrals for the space-time test function
//   psi(t, eta) = mu(t/T) Phi(|eta|_H^4 / T^2)
// and for the logarithmic variant used at the critical exponent.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "heisenheat/cutoff.hpp"
#include "heisenheat/fit.hpp"
#include "heisenheat/forcing.hpp"
#include "heisenheat/grid.hpp"
#include "heisenheat/group.hpp"
#include "heisenheat/quadrature.hpp"
#include "heisenheat/sublaplacian.hpp"

namespace heisenheat {

struct CapacityCutoffs {
    TemporalCutoff mu;
    SpatialCutoff phi;

    static CapacityCutoffs for_exponent(double p) {
        return {TemporalCutoff::for_exponent(p), SpatialCutoff::for_exponent(p)};
    }
    void validate_for(double p) const {
        mu.validate_for(p);
        phi.validate_for(p);
    }
};

struct PsiValue {
    double value = 0.0, dvalue_dt = 0.0, sublaplacian = 0.0;
};

/// Sub-Laplacian of Phi((r^4 + tau^2)/c) for a partially symmetric argument in H^n.
inline double profile_sublaplacian(const Jet& phi, int n, double r, double tau, double c) {
    const double r2 = r * r;
    return phi.d2 * 16.0 * r2 * (r2 * r2 + tau * tau) / (c * c) + phi.d1 * (8.0 * n + 16.0) * r2 / c;
}

inline PsiValue psi_eval(double t, double r, double tau, double big_t, const CapacityCutoffs& c, int n) {
    if (!(big_t > 0.0)) throw std::invalid_argument("psi_eval: T must be positive");
    const double s = t / big_t;
    const double m = c.mu.value(s), dm = c.mu.derivative(s) / big_t;
    const double r2 = r * r;
    const double g = (r2 * r2 + tau * tau) / (big_t * big_t);
    const Jet phi = c.phi.jet(g);
    return {m * phi.v, dm * phi.v, m * profile_sublaplacian(phi, n, r, tau, big_t * big_t)};
}

inline PsiValue psi_eval(double t, const GroupPoint& eta, double big_t, const CapacityCutoffs& c) {
    return psi_eval(t, std::sqrt(eta.horizontal_norm_sq()), eta.tau(), big_t, c, eta.dim());
}

/// Finite-difference sub-Laplacian of psi(t, .) through the reduced stencil.
inline double psi_fd_sublaplacian(double t, double r, double tau, double big_t, const CapacityCutoffs& c, int n,
                                  double dr, double dtau) {
    auto f = [&](double rr, double tt) { return psi_eval(t, rr, tt, big_t, c, n).value; };
    return cylindrical_stencil_at(f, r, tau, dr, dtau, n);
}

struct CapacityResolution {
    int nt = 64;
    int nr = 160;
    int ntau = 320;
    CapacityResolution doubled() const { return {2 * nt, 2 * nr, 2 * ntau}; }
};

namespace detail {

/// (r, tau) cell-centred grid covering |eta|_H^4 <= 2 T^2, scaled with T.
inline CylGrid capacity_grid(double big_t, int n, const CapacityResolution& res) {
    CylGrid g{n, std::pow(2.0, 0.25) * std::sqrt(big_t), std::sqrt(2.0) * big_t, res.nr, res.ntau};
    g.validate();
    return g;
}

/// Literal space-time midpoint sum of w_x * exp(a_t + b_x) over finite entries.
inline double spacetime_log_sum(const std::vector<double>& a_t, double dt, const std::vector<double>& b_x,
                                const std::vector<double>& w_x) {
    std::vector<double> rows(a_t.size(), 0.0), cells(b_x.size());
    for (std::size_t i = 0; i < a_t.size(); ++i) {
        if (!std::isfinite(a_t[i])) continue;
        for (std::size_t x = 0; x < b_x.size(); ++x)
            cells[x] = std::isfinite(b_x[x]) ? w_x[x] * std::exp(a_t[i] + b_x[x]) : 0.0;
        rows[i] = pairwise_sum(cells) * dt;
    }
    return pairwise_sum(rows);
}

inline double conjugate(double p) { return p / (p - 1.0); }

inline void require_p(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("capacity: p must exceed 1");
}

}  // namespace detail

/// Sum over 0 < t < T and |eta|_H^4 <= 2T^2 of psi^{-1/(p-1)} |psi_t|^{p/(p-1)} (zero where psi = 0).
inline double capacity_sigma(double big_t, double p, const GroupDims& dims, const CapacityCutoffs& c,
                             const CapacityResolution& res = {}) {
    detail::require_p(p);
    c.validate_for(p);
    const double q1 = 1.0 / (p - 1.0), pc = detail::conjugate(p);
    const CylGrid g = detail::capacity_grid(big_t, dims.n, res);
    const double dt = big_t / res.nt;
    std::vector<double> a(res.nt);
    for (int i = 0; i < res.nt; ++i) {
        const double s = (i + 0.5) / res.nt;
        const double m = c.mu.value(s), dm = std::abs(c.mu.derivative(s)) / big_t;
        a[i] = (m > 0.0 && dm > 0.0) ? -q1 * std::log(m) + pc * std::log(dm) : -INFINITY;
    }
    std::vector<double> b(g.size()), w(g.size());
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k) {
            const auto idx = g.index(j, k);
            const double r = g.r(j), tau = g.tau(k);
            const double phi = c.phi.value((r * r * r * r + tau * tau) / (big_t * big_t));
            b[idx] = phi > 0.0 ? (pc - q1) * std::log(phi) : -INFINITY;
            w[idx] = sphere_measure(g.n) * g.radial_weight(j) * g.dr() * g.dtau();
        }
    return detail::spacetime_log_sum(a, dt, b, w);
}

/// Sum over 0 < t < T and T^2 <= |eta|_H^4 <= 2T^2 of psi^{-1/(p-1)} |L psi|^{p/(p-1)} (zero where psi = 0).
inline double capacity_omega(double big_t, double p, const GroupDims& dims, const CapacityCutoffs& c,
                             const CapacityResolution& res = {}) {
    detail::require_p(p);
    c.validate_for(p);
    const double q1 = 1.0 / (p - 1.0), pc = detail::conjugate(p);
    const CylGrid g = detail::capacity_grid(big_t, dims.n, res);
    const double dt = big_t / res.nt;
    std::vector<double> a(res.nt);
    for (int i = 0; i < res.nt; ++i) {
        const double m = c.mu.value((i + 0.5) / res.nt);
        a[i] = m > 0.0 ? (pc - q1) * std::log(m) : -INFINITY;
    }
    const double t2 = big_t * big_t;
    std::vector<double> b(g.size()), w(g.size());
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k) {
            const auto idx = g.index(j, k);
            const double r = g.r(j), tau = g.tau(k);
            const double arg = (r * r * r * r + tau * tau) / t2;
            const Jet phi = c.phi.jet(arg);
            const double lap = std::abs(profile_sublaplacian(phi, g.n, r, tau, t2));
            b[idx] = (arg >= 1.0 && phi.v > 0.0 && lap > 0.0) ? -q1 * std::log(phi.v) + pc * std::log(lap) : -INFINITY;
            w[idx] = sphere_measure(g.n) * g.radial_weight(j) * g.dr() * g.dtau();
        }
    return detail::spacetime_log_sum(a, dt, b, w);
}

struct PairingResult {
    double direct = 0.0;      ///< space-time sum of f psi
    double factorized = 0.0;  ///< (int f phi_T) * T * int_0^1 mu
    double spatial = 0.0;     ///< int f phi_T
};

/// Space-time pairing of f with psi over the forcing's extent intersected with supp psi.
inline PairingResult forcing_pairing(double big_t, const ForcingSpec& f, const CapacityCutoffs& c, const GroupDims& dims,
                                     const CapacityResolution& res = {}) {
    PairingResult out;
    if (f.is_zero()) return out;
    const auto ext = f.effective_extent();
    const double r_max = std::min(std::pow(2.0, 0.25) * std::sqrt(big_t), ext.r);
    const double tau_half = std::min(std::sqrt(2.0) * big_t, ext.tau);
    CylGrid g{dims.n, r_max, tau_half, res.nr, res.ntau};
    g.validate();
    const double t2 = big_t * big_t;
    std::vector<double> fx(g.size());
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k) {
            const double r = g.r(j), tau = g.tau(k);
            fx[g.index(j, k)] = sphere_measure(g.n) * g.radial_weight(j) * g.dr() * g.dtau() * f.eval_rt(r, tau) *
                                c.phi.value((r * r * r * r + tau * tau) / t2);
        }
    out.spatial = pairwise_sum(fx);
    const double dt = big_t / res.nt;
    std::vector<double> rows(res.nt), cells(g.size());
    for (int i = 0; i < res.nt; ++i) {
        const double m = c.mu.value((i + 0.5) / res.nt);
        for (std::size_t x = 0; x < fx.size(); ++x) cells[x] = m * fx[x];
        rows[i] = pairwise_sum(cells) * dt;
    }
    out.direct = pairwise_sum(rows);
    out.factorized = out.spatial * big_t * c.mu.integral();
    return out;
}

struct CapacityRow {
    double big_t = 0.0, sigma = 0.0, omega = 0.0, pairing = 0.0, bound = 0.0;
};

struct SubcriticalReport {
    std::vector<CapacityRow> rows;
    double theoretical_lambda = 0.0;  ///< -p/(p-1) + Q/2
    ScalingFit bound_fit, sigma_fit, omega_fit;
    bool fitted = false;
    bool inconclusive = false;
    bool falls_below = false;  ///< B(T) < int f phi_T for some tested T
    bool gate_checked = false;
    bool gate_passed = false;
    double gate_max_change = 0.0;
    std::string note;
};

inline double capacity_lambda(double p, const GroupDims& dims) { return -p / (p - 1.0) + dims.q / 2.0; }

/// B(T) = (Sigma + Omega) / (T int mu) over T_list, with slope fits and the resolution gate.
inline SubcriticalReport subcritical_verdict(const std::vector<double>& t_list, double p, const GroupDims& dims,
                                             const ForcingSpec& f, const CapacityCutoffs& c,
                                             const CapacityResolution& res = {}, bool check_gate = true) {
    if (!(p < dims.second_exponent())) throw std::invalid_argument("subcritical_verdict: needs p < Q/(Q-2)");
    if (t_list.empty()) throw std::invalid_argument("subcritical_verdict: empty T list");
    SubcriticalReport rep;
    rep.theoretical_lambda = capacity_lambda(p, dims);
    const double imu = c.mu.integral();
    std::vector<ScalingSample> sb, ss, so;
    for (double t : t_list) {
        CapacityRow row;
        row.big_t = t;
        row.sigma = capacity_sigma(t, p, dims, c, res);
        row.omega = capacity_omega(t, p, dims, c, res);
        row.pairing = forcing_pairing(t, f, c, dims, res).spatial;
        row.bound = (row.sigma + row.omega) / (t * imu);
        if (row.bound < row.pairing) rep.falls_below = true;
        rep.rows.push_back(row);
        sb.push_back({t, row.bound});
        ss.push_back({t, row.sigma});
        so.push_back({t, row.omega});
    }
    if (check_gate) {
        rep.gate_checked = true;
        const CapacityResolution fine = res.doubled();
        for (double t : {t_list.front(), t_list.back()}) {
            const double s0 = capacity_sigma(t, p, dims, c, res), s1 = capacity_sigma(t, p, dims, c, fine);
            const double o0 = capacity_omega(t, p, dims, c, res), o1 = capacity_omega(t, p, dims, c, fine);
            rep.gate_max_change =
                std::max({rep.gate_max_change, std::abs(s1 - s0) / std::abs(s1), std::abs(o1 - o0) / std::abs(o1)});
        }
        rep.gate_passed = rep.gate_max_change <= 0.01;
    }
    if (t_list.size() >= 4) {
        rep.bound_fit = fit_exponent(sb, rep.theoretical_lambda);
        rep.sigma_fit = fit_exponent(ss, rep.theoretical_lambda + 1.0);
        rep.omega_fit = fit_exponent(so, rep.theoretical_lambda + 1.0);
        rep.fitted = true;
        if (rep.bound_fit.residual_r2 < 0.95) {
            rep.inconclusive = true;
            rep.note = "slope fit residual r2 below 0.95";
        }
    } else {
        rep.note = "fewer than 4 scales: no fit";
    }
    return rep;
}

struct CriticalRow {
    double radius = 0.0, big_t = 0.0, term1 = 0.0, term2 = 0.0, total = 0.0;
    double term2_ratio = 0.0;  ///< term2 / (ln R)^{-Q/2}
};

struct CriticalReport {
    std::vector<CriticalRow> rows;
    double theoretical_term1_slope = 0.0;  ///< Q (1 - j/2)
    ScalingFit term1_fit;
    double term2_ratio_spread = 0.0;  ///< max/min - 1 of the term-2 ratios
    bool total_decreasing = false;
};

/// Capacity terms with psi = mu(t/T) phi_R(eta), T = R^j, normalized by T int mu.
inline CriticalReport critical_capacity(const std::vector<double>& r_list, double j, double p, const GroupDims& dims,
                                        int kappa_prime = 0, GaugePolarRule rule = {800, 128, true}) {
    if (std::abs(p - dims.second_exponent()) > 1e-12) throw std::invalid_argument("critical_capacity: needs p = Q/(Q-2)");
    if (!(j > 3.0)) throw std::invalid_argument("critical_capacity: needs j > 3");
    if (r_list.size() < 2) throw std::invalid_argument("critical_capacity: need at least two radii");
    const auto [lo, hi] = std::minmax_element(r_list.begin(), r_list.end());
    if (!(*lo > 1.0) || std::log10(*hi / *lo) < 2.0 - 1e-12)
        throw std::invalid_argument("critical_capacity: R list must exceed 1 and span at least 2 decades");
    const int kp = kappa_prime > 0 ? kappa_prime : required_cutoff_exponent(p);
    const TemporalCutoff mu = TemporalCutoff::for_exponent(p);
    const double q1 = 1.0 / (p - 1.0), pc = detail::conjugate(p);
    // int_0^1 mu^{-1/(p-1)} |mu'|^{p'} ds by a fine midpoint rule.
    const int ns = 20000;
    std::vector<double> cells(ns);
    for (int i = 0; i < ns; ++i) {
        const double s = (i + 0.5) / ns, m = mu.value(s), dm = std::abs(mu.derivative(s));
        cells[i] = (m > 0.0 && dm > 0.0) ? std::exp(-q1 * std::log(m) + pc * std::log(dm)) / ns : 0.0;
    }
    const double i_sigma = pairwise_sum(cells), i_mu = mu.integral();

    CriticalReport rep;
    rep.theoretical_term1_slope = dims.q * (1.0 - j / 2.0);
    std::vector<ScalingSample> t1;
    for (double radius : r_list) {
        const LogCutoff cut(kp, radius);
        const double inner = std::sqrt(radius);
        const double vol_inner = gauge_ball_volume(dims.n) * std::pow(inner, dims.q);
        const double phi_outer = integrate_gauge_shell(
            [&](double r, double tau) { return cut.value(gauge_norm_rt(r, tau)); }, dims.n, inner, radius, rule);
        const double omega_space = integrate_gauge_shell(
            [&](double r, double tau) {
                const double v = cut.value(gauge_norm_rt(r, tau));
                const double lap = std::abs(cut.sublaplacian(dims.n, r, tau));
                if (!(v > 0.0) || !(lap > 0.0)) return 0.0;
                return std::exp(-q1 * std::log(v) + pc * std::log(lap));
            },
            dims.n, inner, radius, rule);
        CriticalRow row;
        row.radius = radius;
        row.big_t = std::pow(radius, j);
        row.term1 = std::exp(-pc * std::log(row.big_t)) * i_sigma / i_mu * (vol_inner + phi_outer);
        row.term2 = omega_space;
        row.total = row.term1 + row.term2;
        row.term2_ratio = row.term2 / std::pow(std::log(radius), -dims.q / 2.0);
        rep.rows.push_back(row);
        t1.push_back({radius, row.term1});
    }
    rep.term1_fit = loglog_least_squares(t1, rep.theoretical_term1_slope);
    double rmin = rep.rows.front().term2_ratio, rmax = rmin;
    for (const auto& r : rep.rows) {
        rmin = std::min(rmin, r.term2_ratio);
        rmax = std::max(rmax, r.term2_ratio);
    }
    rep.term2_ratio_spread = rmax / rmin - 1.0;
    std::vector<CriticalRow> sorted = rep.rows;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.radius < b.radius; });
    rep.total_decreasing = true;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (!(sorted[i].total < sorted[i - 1].total)) rep.total_decreasing = false;
    return rep;
}

}  // namespace heisenheat
