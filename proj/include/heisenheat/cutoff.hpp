#pragma once

// Cutoff functions for the capacity test functions.
//
//   TemporalCutoff  mu(s) = (s(1-s))^kappa on (0,1), zero outside
//   SpatialCutoff   Phi(g) = theta(g)^kappa', theta = 1 on [0,1], 0 on [2,inf),
//                   quintic smoothstep in between
//   LogCutoff       phi(eta) = Psi(ln(|eta|_H / sqrt R) / ln sqrt R), Psi = (1 - S(z))^kappa'
//
// Exponents default to ceil(2p/(p-1)), which keeps psi^{-1/(p-1)} |D psi|^{p/(p-1)}
// bounded near the edges of every support.

#include <cmath>
#include <stdexcept>
#include <string>

#include "heisenheat/group.hpp"
#include "heisenheat/sublaplacian.hpp"

namespace heisenheat {

/// Smallest integer exponent >= 2p/(p-1), tolerant to rounding in p.
inline int required_cutoff_exponent(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("cutoff exponent: p must exceed 1");
    return static_cast<int>(std::ceil(2.0 * p / (p - 1.0) - 1e-9));
}

/// Quintic smoothstep S(x) = 6x^5 - 15x^4 + 10x^3 clamped to [0,1], with derivatives.
struct Smoothstep {
    static double value(double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
    }
    static double d1(double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        const double t = x * (1.0 - x);
        return 30.0 * t * t;
    }
    static double d2(double x) {
        if (x <= 0.0 || x >= 1.0) return 0.0;
        return 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
    }
};

/// Value and first two derivatives of a scalar profile.
struct Jet {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};

/// Raise a [0,1]-valued transition jet to an integer power.
inline Jet pow_jet(const Jet& b, int k) {
    if (b.v <= 0.0) return {};
    const double pk2 = k >= 2 ? std::pow(b.v, k - 2) : 0.0;
    const double pk1 = std::pow(b.v, k - 1);
    return {pk1 * b.v, k * pk1 * b.d1, k * (k - 1) * pk2 * b.d1 * b.d1 + k * pk1 * b.d2};
}

struct TemporalCutoff {
    int kappa = 6;

    static TemporalCutoff for_exponent(double p) { return {required_cutoff_exponent(p)}; }

    void validate_for(double p) const {
        if (kappa < required_cutoff_exponent(p))
            throw std::invalid_argument("TemporalCutoff: kappa = " + std::to_string(kappa) +
                                        " too small for integrability at p = " + std::to_string(p));
    }

    double value(double s) const {
        if (s <= 0.0 || s >= 1.0) return 0.0;
        return std::pow(s * (1.0 - s), kappa);
    }
    double derivative(double s) const {
        if (s <= 0.0 || s >= 1.0) return 0.0;
        return kappa * std::pow(s * (1.0 - s), kappa - 1) * (1.0 - 2.0 * s);
    }
    /// Integral over (0,1): Beta(kappa+1, kappa+1).
    double integral() const { return std::exp(2.0 * std::lgamma(kappa + 1.0) - std::lgamma(2.0 * kappa + 2.0)); }
};

struct SpatialCutoff {
    int kappa_prime = 6;

    static SpatialCutoff for_exponent(double p) { return {required_cutoff_exponent(p)}; }

    void validate_for(double p) const {
        if (kappa_prime < required_cutoff_exponent(p))
            throw std::invalid_argument("SpatialCutoff: kappa' = " + std::to_string(kappa_prime) +
                                        " too small for integrability at p = " + std::to_string(p));
    }

    /// theta(g) = 1 - S(g - 1).
    static Jet base(double g) { return {1.0 - Smoothstep::value(g - 1.0), -Smoothstep::d1(g - 1.0), -Smoothstep::d2(g - 1.0)}; }

    Jet jet(double g) const { return pow_jet(base(g), kappa_prime); }
    double value(double g) const { return jet(g).v; }
};

/// The logarithmic cutoff at scale R, as a profile of the gauge radius rho.
struct LogCutoff {
    int kappa_prime = 4;
    double scale_r = 100.0;

    LogCutoff(int kp, double r) : kappa_prime(kp), scale_r(r) {
        if (!(r > 1.0)) throw std::invalid_argument("LogCutoff: R must exceed 1");
    }

    double log_half() const { return 0.5 * std::log(scale_r); }

    /// z = ln(rho / sqrt R) / ln sqrt R.
    double argument(double rho) const { return std::log(rho) / log_half() - 1.0; }

    static Jet base(double z) { return {1.0 - Smoothstep::value(z), -Smoothstep::d1(z), -Smoothstep::d2(z)}; }

    /// phi and its derivatives with respect to rho (rho > 0).
    Jet radial_jet(double rho) const {
        const Jet psi = pow_jet(base(argument(rho)), kappa_prime);
        const double l = log_half();
        return {psi.v, psi.d1 / (l * rho), psi.d2 / (l * l * rho * rho) - psi.d1 / (l * rho * rho)};
    }

    double value(double rho) const {
        if (rho <= std::sqrt(scale_r)) return 1.0;
        if (rho >= scale_r) return 0.0;
        return pow_jet(base(argument(rho)), kappa_prime).v;
    }

    /// Sub-Laplacian of phi at (r, tau) for H^N via the gauge-radial formula.
    double sublaplacian(int n, double r, double tau) const {
        const double rho = gauge_norm_rt(r, tau);
        if (rho <= std::sqrt(scale_r) || rho >= scale_r) return 0.0;
        const Jet j = radial_jet(rho);
        const int q = 2 * n + 2;
        return r * r / (rho * rho) * (j.d2 + (q - 1) / rho * j.d1);
    }
};

/// psi_R(eta) = theta(|eta|_H / R): equal to 1 on the gauge ball of radius R, zero beyond 2R.
inline double truncation_cutoff(double rho, double radius) {
    return SpatialCutoff::base(rho / radius).v;
}

}  // namespace heisenheat
