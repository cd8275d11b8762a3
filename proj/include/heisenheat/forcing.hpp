#pragma once

// Forcing terms f(eta) and initial data u_0(eta). All variants are partially
// symmetric, i.e. functions of r = |z| and tau only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "heisenheat/cutoff.hpp"
#include "heisenheat/group.hpp"
#include "heisenheat/quadrature.hpp"

namespace heisenheat {

struct ZeroForcing {};

/// eps |eta|_H^{-2 lambda_f} outside the unit gauge ball, eps * inner_cap inside.
struct SingularPowerForcing {
    double epsilon = 1.0;
    double lambda_f = 2.5;
    double inner_cap = 1.0;
};

/// amplitude * exp(-|z|^2 / w^2 - tau^2 / w^4): a Gaussian compatible with the dilations.
struct GaussianBumpForcing {
    double amplitude = 1.0;
    double width = 1.0;
};

/// eps (1 + |eta|_H)^{-decay}.
struct RegularPowerForcing {
    double epsilon = 1.0;
    double decay = 6.0;
};

class ForcingSpec {
public:
    using Variant = std::variant<ZeroForcing, SingularPowerForcing, GaussianBumpForcing, RegularPowerForcing>;

    ForcingSpec() = default;
    ForcingSpec(Variant v) : v_(std::move(v)) { validate(); }  // NOLINT: implicit by design of the variant API

    static ForcingSpec zero() { return ForcingSpec(ZeroForcing{}); }
    static ForcingSpec singular_power(double eps, double lambda_f, double inner_cap = 1.0) {
        return ForcingSpec(SingularPowerForcing{eps, lambda_f, inner_cap});
    }
    static ForcingSpec gaussian_bump(double amplitude, double width) {
        return ForcingSpec(GaussianBumpForcing{amplitude, width});
    }
    static ForcingSpec regular_power(double eps, double decay) {
        return ForcingSpec(RegularPowerForcing{eps, decay});
    }

    const Variant& variant() const { return v_; }
    bool is_zero() const { return std::holds_alternative<ZeroForcing>(v_); }

    std::string name() const {
        return std::visit(
            [](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ZeroForcing>) return "zero";
                else if constexpr (std::is_same_v<T, SingularPowerForcing>) return "singular_power";
                else if constexpr (std::is_same_v<T, GaussianBumpForcing>) return "gaussian";
                else return "regular_power";
            },
            v_);
    }

    /// Amplitude parameter (epsilon or Gaussian amplitude; 0 for zero forcing).
    double amplitude() const {
        return std::visit(
            [](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ZeroForcing>) return 0.0;
                else if constexpr (std::is_same_v<T, GaussianBumpForcing>) return f.amplitude;
                else return f.epsilon;
            },
            v_);
    }

    double eval_rt(double r, double tau) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ZeroForcing>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, SingularPowerForcing>) {
                    const double rho = gauge_norm_rt(r, tau);
                    return rho <= 1.0 ? f.epsilon * f.inner_cap : f.epsilon * std::pow(rho, -2.0 * f.lambda_f);
                } else if constexpr (std::is_same_v<T, GaussianBumpForcing>) {
                    const double w2 = f.width * f.width;
                    return f.amplitude * std::exp(-r * r / w2 - tau * tau / (w2 * w2));
                } else {
                    return f.epsilon * std::pow(1.0 + gauge_norm_rt(r, tau), -f.decay);
                }
            },
            v_);
    }

    double eval(const GroupPoint& eta) const { return eval_rt(std::sqrt(eta.horizontal_norm_sq()), eta.tau()); }

    /// Box |z| <= r, |tau| <= tau beyond which f vanishes to double precision; infinite for power tails.
    struct Extent {
        double r = 0.0, tau = 0.0;
        bool bounded = true;
    };
    Extent effective_extent() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        if (is_zero()) return {0.0, 0.0, true};
        if (const auto* g = std::get_if<GaussianBumpForcing>(&v_)) return {7.0 * g->width, 7.0 * g->width * g->width, true};
        return {inf, inf, false};
    }

    /// True when f is integrable over H^n.
    bool integrable(int n) const {
        const int q = 2 * n + 2;
        if (const auto* s = std::get_if<SingularPowerForcing>(&v_)) return 2.0 * s->lambda_f > q;
        if (const auto* s = std::get_if<RegularPowerForcing>(&v_)) return s->decay > q;
        return true;
    }

    /// Closed-form integral of f over H^n (infinite if not integrable).
    double total_integral(int n) const {
        const int q = 2 * n + 2;
        if (!integrable(n)) return std::numeric_limits<double>::infinity();
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, ZeroForcing>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, SingularPowerForcing>) {
                    const double b1 = gauge_ball_volume(n);
                    return f.epsilon * (f.inner_cap * b1 + q * b1 / (2.0 * f.lambda_f - q));
                } else if constexpr (std::is_same_v<T, GaussianBumpForcing>) {
                    const double w2 = f.width * f.width;
                    return f.amplitude * std::pow(std::numbers::pi * w2, n) * std::sqrt(std::numbers::pi) * w2;
                } else {
                    const double beta = std::exp(std::lgamma(q) + std::lgamma(f.decay - q) - std::lgamma(f.decay));
                    return f.epsilon * q * gauge_ball_volume(n) * beta;
                }
            },
            v_);
    }

private:
    void validate() const {
        std::visit(
            [](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, SingularPowerForcing>) {
                    if (!(f.epsilon > 0)) throw std::invalid_argument("singular_power: epsilon must be positive");
                    if (!(f.lambda_f > 0)) throw std::invalid_argument("singular_power: lambda_f must be positive");
                    if (!(f.inner_cap >= 1.0)) throw std::invalid_argument("singular_power: inner_cap must be >= 1");
                } else if constexpr (std::is_same_v<T, GaussianBumpForcing>) {
                    if (!(f.width > 0)) throw std::invalid_argument("gaussian_bump: width must be positive");
                    if (!std::isfinite(f.amplitude)) throw std::invalid_argument("gaussian_bump: amplitude must be finite");
                } else if constexpr (std::is_same_v<T, RegularPowerForcing>) {
                    if (!(f.epsilon > 0)) throw std::invalid_argument("regular_power: epsilon must be positive");
                    if (!(f.decay > 0)) throw std::invalid_argument("regular_power: decay must be positive");
                }
            },
            v_);
    }

    Variant v_{ZeroForcing{}};
};

inline double eval_forcing(const ForcingSpec& spec, const GroupPoint& eta) { return spec.eval(eta); }

/// Initial data u_0: zero, constant c, or amplitude * exp(-|z|^2/w^2 - tau^2/w^4).
struct InitialData {
    enum class Kind { zero, constant, gaussian } kind = Kind::zero;
    double amplitude = 0.0;
    double width = 1.0;

    static InitialData zero() { return {}; }
    static InitialData constant(double c) { return {Kind::constant, c, 1.0}; }
    static InitialData gaussian(double a, double w) {
        if (!(w > 0)) throw std::invalid_argument("InitialData: gaussian width must be positive");
        return {Kind::gaussian, a, w};
    }

    double eval_rt(double r, double tau) const {
        switch (kind) {
            case Kind::zero: return 0.0;
            case Kind::constant: return amplitude;
            case Kind::gaussian: {
                const double w2 = width * width;
                return amplitude * std::exp(-r * r / w2 - tau * tau / (w2 * w2));
            }
        }
        return 0.0;
    }

    std::string name() const {
        switch (kind) {
            case Kind::zero: return "zero";
            case Kind::constant: return "constant";
            case Kind::gaussian: return "gaussian";
        }
        return "?";
    }
};

struct TruncatedIntegral {
    double value = 0.0;
    bool tail_integrable = true;
};

/// Integral of f psi_R with psi_R = 1 on |eta|_H <= R, smooth decay to 0 at 2R.
inline TruncatedIntegral forcing_integral_truncated(const ForcingSpec& spec, double radius, int n,
                                                    GaugePolarRule rule = {}) {
    if (!(radius > 0.0)) throw std::invalid_argument("forcing_integral_truncated: R must be positive");
    TruncatedIntegral out;
    out.tail_integrable = spec.integrable(n);
    if (spec.is_zero()) return out;
    auto integrand = [&](double r, double tau) {
        return spec.eval_rt(r, tau) * truncation_cutoff(gauge_norm_rt(r, tau), radius);
    };
    // Breakpoints at the cap edge and the cutoff's transition keep each shell smooth.
    std::vector<double> breaks = {0.0, 2.0 * radius};
    if (radius > 1.0) breaks.push_back(1.0);
    else if (2.0 * radius > 1.0) breaks.push_back(1.0);
    breaks.push_back(radius);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        GaugePolarRule seg = rule;
        seg.log_spacing = breaks[i] >= 1.0 && breaks[i + 1] / breaks[i] > 4.0;
        total += integrate_gauge_shell(integrand, n, breaks[i], breaks[i + 1], seg);
    }
    out.value = total;
    return out;
}

}  // namespace heisenheat
