#pragma once

// Heisenberg group H^N: points, group law, gauge norm and dilations.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace heisenheat {

/// Heisenberg parameter N together with the homogeneous dimension Q = 2N + 2.
struct GroupDims {
    int n = 1;
    int q = 4;

    GroupDims() = default;
    explicit GroupDims(int heisenberg_n) : n(heisenberg_n), q(2 * heisenberg_n + 2) {
        if (heisenberg_n < 1)
            throw std::invalid_argument("GroupDims: N must be >= 1, got " + std::to_string(heisenberg_n));
    }

    /// Fujita exponent 1 + 2/Q of the unforced problem.
    double fujita_exponent() const { return 1.0 + 2.0 / q; }
    /// Critical exponent Q/(Q-2) of the forced problem; finite since Q >= 4.
    double second_exponent() const { return static_cast<double>(q) / (q - 2); }

    friend bool operator==(const GroupDims&, const GroupDims&) = default;
};

/// An element (x, y, tau) of H^N with x, y in R^N.
class GroupPoint {
public:
    GroupPoint() : x_(1, 0.0), y_(1, 0.0) {}

    GroupPoint(std::vector<double> x, std::vector<double> y, double tau)
        : x_(std::move(x)), y_(std::move(y)), tau_(tau) {
        if (x_.empty() || x_.size() != y_.size())
            throw std::invalid_argument("GroupPoint: x and y must have equal length N >= 1");
        for (std::size_t i = 0; i < x_.size(); ++i)
            if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
                throw std::invalid_argument("GroupPoint: non-finite coordinate");
        if (!std::isfinite(tau_))
            throw std::invalid_argument("GroupPoint: non-finite tau");
    }

    /// Convenience constructor for H^1.
    GroupPoint(double x, double y, double tau) : GroupPoint(std::vector{x}, std::vector{y}, tau) {}

    /// Identity element of H^N.
    static GroupPoint identity(int n) {
        return GroupPoint(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0);
    }

    /// Representative point (r, 0, ..., 0; 0, ..., 0; tau) of a partially symmetric orbit.
    static GroupPoint on_ray(int n, double r, double tau) {
        std::vector<double> x(n, 0.0);
        x[0] = r;
        return GroupPoint(std::move(x), std::vector<double>(n, 0.0), tau);
    }

    int dim() const { return static_cast<int>(x_.size()); }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    double tau() const { return tau_; }

    /// |z|^2 = |x|^2 + |y|^2, the squared Euclidean norm of the horizontal part.
    double horizontal_norm_sq() const {
        double s = 0.0;
        for (std::size_t i = 0; i < x_.size(); ++i) s += x_[i] * x_[i] + y_[i] * y_[i];
        return s;
    }

    friend bool operator==(const GroupPoint&, const GroupPoint&) = default;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    double tau_ = 0.0;
};

namespace detail {
inline void require_same_dim(const GroupPoint& a, const GroupPoint& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("Heisenberg group: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()) + ")");
}
}  // namespace detail

/// Group law (x+x', y+y', tau+tau' + 2(<x,y'> - <x',y>)).
inline GroupPoint group_mul(const GroupPoint& a, const GroupPoint& b) {
    detail::require_same_dim(a, b);
    const int n = a.dim();
    std::vector<double> x(n), y(n);
    double twist = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = a.x()[i] + b.x()[i];
        y[i] = a.y()[i] + b.y()[i];
        twist += a.x()[i] * b.y()[i] - b.x()[i] * a.y()[i];
    }
    return GroupPoint(std::move(x), std::move(y), a.tau() + b.tau() + 2.0 * twist);
}

inline GroupPoint group_inverse(const GroupPoint& a) {
    std::vector<double> x(a.x()), y(a.y());
    for (auto& v : x) v = -v;
    for (auto& v : y) v = -v;
    return GroupPoint(std::move(x), std::move(y), -a.tau());
}

/// Gauge |eta|_H = ((|x|^2 + |y|^2)^2 + tau^2)^{1/4}.
inline double gauge_norm(const GroupPoint& a) {
    const double z2 = a.horizontal_norm_sq();
    return std::sqrt(std::sqrt(z2 * z2 + a.tau() * a.tau()));
}

/// Gauge in reduced coordinates r = |z|, tau.
inline double gauge_norm_rt(double r, double tau) {
    const double r2 = r * r;
    return std::sqrt(std::sqrt(r2 * r2 + tau * tau));
}

/// Anisotropic dilation (lambda x, lambda y, lambda^2 tau), lambda > 0.
inline GroupPoint dilate(double lambda, const GroupPoint& a) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("dilate: lambda must be a positive finite real");
    std::vector<double> x(a.x()), y(a.y());
    for (auto& v : x) v *= lambda;
    for (auto& v : y) v *= lambda;
    return GroupPoint(std::move(x), std::move(y), lambda * lambda * a.tau());
}

}  // namespace heisenheat
