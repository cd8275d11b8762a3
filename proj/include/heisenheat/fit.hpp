#pragma once

// Least-squares fits of log(value) against log(scale).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace heisenheat {

struct ScalingSample {
    double scale = 0.0, value = 0.0;
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_r2 = 1.0;
    double theoretical_slope = 0.0;
    double deviation = 0.0;  ///< |slope - theoretical|
    std::vector<ScalingSample> samples;
};

/// Plain log-log least squares; needs two or more positive samples at distinct scales.
inline ScalingFit loglog_least_squares(const std::vector<ScalingSample>& samples, double theoretical) {
    if (samples.size() < 2) throw std::invalid_argument("loglog_least_squares: need at least two samples");
    double sx = 0.0, sy = 0.0;
    for (const auto& s : samples) {
        if (!(s.scale > 0.0) || !(s.value > 0.0))
            throw std::invalid_argument("loglog_least_squares: scales and values must be positive");
        sx += std::log(s.scale);
        sy += std::log(s.value);
    }
    const double n = static_cast<double>(samples.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& s : samples) {
        const double dx = std::log(s.scale) - mx, dy = std::log(s.value) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("loglog_least_squares: scales must not all coincide");
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (const auto& s : samples) {
        const double e = std::log(s.value) - (fit.intercept + fit.slope * std::log(s.scale));
        ss_res += e * e;
    }
    // A flat series fitted exactly counts as a perfect fit.
    fit.residual_r2 = syy > 0.0 ? 1.0 - ss_res / syy : (ss_res <= 1e-24 * n ? 1.0 : 0.0);
    fit.theoretical_slope = theoretical;
    fit.deviation = std::abs(fit.slope - theoretical);
    fit.samples = samples;
    return fit;
}

/// Exponent fit with the sampling requirements: at least 4 samples over at least 1.5 decades.
inline ScalingFit fit_exponent(const std::vector<ScalingSample>& samples, double theoretical) {
    if (samples.size() < 4) throw std::invalid_argument("fit_exponent: need at least 4 samples");
    double lo = samples.front().scale, hi = lo;
    for (const auto& s : samples) {
        if (!(s.value > 0.0)) throw std::invalid_argument("fit_exponent: non-positive value");
        if (!(s.scale > 0.0)) throw std::invalid_argument("fit_exponent: non-positive scale");
        lo = std::min(lo, s.scale);
        hi = std::max(hi, s.scale);
    }
    if (std::log10(hi / lo) < 1.5 - 1e-12) throw std::invalid_argument("fit_exponent: samples span under 1.5 decades");
    return loglog_least_squares(samples, theoretical);
}

/// Slope through two samples in log-log space.
inline double two_point_slope(const ScalingSample& a, const ScalingSample& b) {
    return (std::log(b.value) - std::log(a.value)) / (std::log(b.scale) - std::log(a.scale));
}

}  // namespace heisenheat
