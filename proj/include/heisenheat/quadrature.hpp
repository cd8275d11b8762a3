#pragma once

// Quadrature of partially symmetric integrands g(r, tau) over gauge shells.
//
// With r^2 = rho^2 cos(a), tau = rho^2 sin(a), a in (-pi/2, pi/2), the reduced
// measure sigma_{2N} r^{2N-1} dr dtau becomes sigma_{2N} rho^{Q-1} cos^{N-1}(a) drho da.
// This resolves integrands that vary on a fixed gauge scale over many decades of
// rho, which a uniform (r, tau) grid cannot do.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "heisenheat/grid.hpp"

namespace heisenheat {

struct GaugePolarRule {
    int n_rho = 400;
    int n_angle = 96;
    bool log_spacing = false;
};

/// Integral of g(r, tau) over rho_lo <= |eta|_H <= rho_hi in H^n (midpoint rule in rho or ln rho, and in a).
template <class G>
double integrate_gauge_shell(G&& g, int n, double rho_lo, double rho_hi, GaugePolarRule rule) {
    if (!(rho_hi > rho_lo) || rho_lo < 0.0) throw std::invalid_argument("integrate_gauge_shell: bad radial range");
    if (rule.log_spacing && rho_lo <= 0.0)
        throw std::invalid_argument("integrate_gauge_shell: log spacing needs rho_lo > 0");
    const int q = 2 * n + 2;
    const double da = std::numbers::pi / rule.n_angle;
    std::vector<double> ca(rule.n_angle), sa(rule.n_angle), wa(rule.n_angle);
    for (int k = 0; k < rule.n_angle; ++k) {
        const double a = -0.5 * std::numbers::pi + (k + 0.5) * da;
        ca[k] = std::cos(a);
        sa[k] = std::sin(a);
        wa[k] = std::pow(ca[k], n - 1) * da;
    }
    std::vector<double> rows(rule.n_rho);
    const double s_lo = rule.log_spacing ? std::log(rho_lo) : rho_lo;
    const double s_hi = rule.log_spacing ? std::log(rho_hi) : rho_hi;
    const double ds = (s_hi - s_lo) / rule.n_rho;
    std::vector<double> cells(rule.n_angle);
    for (int i = 0; i < rule.n_rho; ++i) {
        const double s = s_lo + (i + 0.5) * ds;
        const double rho = rule.log_spacing ? std::exp(s) : s;
        const double jac = std::pow(rho, q - 1) * (rule.log_spacing ? rho : 1.0) * ds;
        for (int k = 0; k < rule.n_angle; ++k)
            cells[k] = wa[k] * g(rho * std::sqrt(ca[k]), rho * rho * sa[k]);
        rows[i] = jac * pairwise_sum(cells);
    }
    return sphere_measure(n) * pairwise_sum(rows);
}

/// Volume of the unit gauge ball in H^n: sigma_{2N} B(N/2, 3/2) / 2.
inline double gauge_ball_volume(int n) {
    const double a = 0.5 * n, b = 1.5;
    const double beta = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return 0.5 * sphere_measure(n) * beta;
}

}  // namespace heisenheat
