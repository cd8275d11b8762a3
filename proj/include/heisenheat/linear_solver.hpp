#pragma once

// Preconditioned conjugate gradients for the implicit step (I - dt L) u = b,
// where L is self-adjoint for a diagonal node weight W. The iteration runs on
// the symmetric positive definite form W (I - dt L) u = W b.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "heisenheat/sublaplacian.hpp"

namespace heisenheat {

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

namespace detail {
inline double dot(std::span<const double> a, std::span<const double> b) {
    // Fixed-order blocked accumulation keeps the result independent of callers.
    double total = 0.0;
    constexpr std::size_t block = 4096;
    for (std::size_t s = 0; s < a.size(); s += block) {
        const std::size_t e = std::min(a.size(), s + block);
        double part = 0.0;
        for (std::size_t i = s; i < e; ++i) part += a[i] * b[i];
        total += part;
    }
    return total;
}
}  // namespace detail

/// Jacobi preconditioner: inverts the diagonal of W (I - dt L).
class JacobiPreconditioner {
public:
    JacobiPreconditioner(std::vector<double> weights, const std::vector<double>& l_diag, double dt)
        : inv_(weights.size()) {
        for (std::size_t i = 0; i < inv_.size(); ++i) inv_[i] = 1.0 / (weights[i] * (1.0 - dt * l_diag[i]));
    }
    void operator()(std::span<const double> r, std::span<double> z) const {
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_[i] * r[i];
    }

private:
    std::vector<double> inv_;
};

/// Block Jacobi over tau-lines of the cylinder: each radial column's tridiagonal
/// block of W (I - dt L) is solved exactly by the Thomas algorithm.
class TauLinePreconditioner {
public:
    TauLinePreconditioner(const CylSubLaplacian& op, double dt)
        : nr_(op.grid().nr), nt_(op.grid().ntau), cprime_(static_cast<std::size_t>(nr_) * nt_),
          denom_(static_cast<std::size_t>(nr_) * nt_), off_(nr_) {
        const auto& w = op.radial_weights();
        for (int j = 0; j < nr_; ++j) {
            double diag_r = op.plus()[j] + op.minus()[j];
            if (op.form() == OperatorForm::cylindrical && j == 0) diag_r = op.plus()[j];
            const double diag = w[j] * (1.0 + dt * (diag_r + 2.0 * op.ctau()[j]));
            const double off = -w[j] * dt * op.ctau()[j];
            off_[j] = off;
            double* cp = cprime_.data() + static_cast<std::size_t>(j) * nt_;
            double* dn = denom_.data() + static_cast<std::size_t>(j) * nt_;
            dn[0] = diag;
            cp[0] = off / diag;
            for (int k = 1; k < nt_; ++k) {
                dn[k] = diag - off * cp[k - 1];
                cp[k] = off / dn[k];
            }
        }
    }

    void operator()(std::span<const double> r, std::span<double> z) const {
        for (int j = 0; j < nr_; ++j) {
            const std::size_t base = static_cast<std::size_t>(j) * nt_;
            const double* cp = cprime_.data() + base;
            const double* dn = denom_.data() + base;
            const double off = off_[j];
            double* zz = z.data() + base;
            const double* rr = r.data() + base;
            zz[0] = rr[0] / dn[0];
            for (int k = 1; k < nt_; ++k) zz[k] = (rr[k] - off * zz[k - 1]) / dn[k];
            for (int k = nt_ - 2; k >= 0; --k) zz[k] -= cp[k] * zz[k + 1];
        }
    }

private:
    int nr_, nt_;
    std::vector<double> cprime_, denom_, off_;
};

/// Solve (I - dt L) u = b for u, starting from the contents of u.
/// `apply_l(in, out)` evaluates L; `weights` is the node weight W; `precond(r, z)` approximates
/// the inverse of W (I - dt L). Convergence is declared when the W-norm relative residual <= rtol.
template <class ApplyL, class Precond>
CgResult solve_implicit(ApplyL&& apply_l, std::span<const double> weights, double dt, std::span<const double> b,
                        std::span<double> u, Precond&& precond, double rtol = 1e-10, int max_iter = 2000) {
    const std::size_t n = b.size();
    std::vector<double> r(n), z(n), p(n), q(n), lu(n);
    auto apply_a = [&](std::span<const double> in, std::span<double> out) {
        apply_l(in, std::span<double>(lu));
        for (std::size_t i = 0; i < n; ++i) out[i] = weights[i] * (in[i] - dt * lu[i]);
    };
    auto wnorm = [&](std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i] * v[i] / weights[i];
        return std::sqrt(s);
    };
    std::vector<double> wb(n);
    for (std::size_t i = 0; i < n; ++i) wb[i] = weights[i] * b[i];
    const double bnorm = wnorm(wb);
    CgResult res;
    if (bnorm == 0.0) {
        for (auto& v : u) v = 0.0;
        res.converged = true;
        return res;
    }
    apply_a(u, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = wb[i] - q[i];
    res.relative_residual = wnorm(r) / bnorm;
    if (res.relative_residual <= rtol) {
        res.converged = true;
        return res;
    }
    precond(std::span<const double>(r), std::span<double>(z));
    p = z;
    double rz = detail::dot(r, z);
    for (int it = 1; it <= max_iter; ++it) {
        apply_a(p, q);
        const double pq = detail::dot(p, q);
        if (!(pq > 0.0)) break;
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res.iterations = it;
        res.relative_residual = wnorm(r) / bnorm;
        if (res.relative_residual <= rtol) {
            res.converged = true;
            return res;
        }
        precond(std::span<const double>(r), std::span<double>(z));
        const double rz_new = detail::dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return res;
}

}  // namespace heisenheat
