#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "heisenheat/verify.hpp"

using namespace heisenheat;

namespace {

template <class Grid>
double interior_error(const ScalarField<Grid>& l, const std::function<double(std::size_t)>& exact, int band) {
    const auto& g = l.grid;
    double e = 0.0;
    if constexpr (std::is_same_v<Grid, BoxGrid3>) {
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                for (int k = 0; k < g.ntau; ++k)
                    if (!g.in_boundary_band(i, j, k, band)) {
                        const auto a = g.index(i, j, k);
                        e = std::max(e, std::abs(l[a] - exact(a)));
                    }
    } else {
        for (int j = 0; j < g.nr; ++j)
            for (int k = 0; k < g.ntau; ++k)
                if (!g.in_boundary_band(j, k, band)) {
                    const auto a = g.index(j, k);
                    e = std::max(e, std::abs(l[a] - exact(a)));
                }
    }
    return e;
}

BoxField random_interior(const BoxGrid3& g, std::mt19937_64& rng, int band) {
    std::normal_distribution<double> d;
    BoxField u(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.ntau; ++k)
                if (!g.in_boundary_band(i, j, k, band)) u[g.index(i, j, k)] = d(rng);
    return u;
}

}  // namespace

TEST(ApplyDirect, QuadraticHorizontalIsExactlyFour) {
    const BoxGrid3 g(2, 2, 2, 12, 12, 12);
    const auto u = sample_xyt(g, [](double x, double y, double) { return x * x + y * y; });
    EXPECT_LT(interior_error(apply_direct(u), [](std::size_t) { return 4.0; }, 1), 1e-10);
}

TEST(ApplyDirect, LinearTauIsZero) {
    const BoxGrid3 g(2, 2, 2, 12, 12, 12);
    const auto u = sample_xyt(g, [](double, double, double t) { return t; });
    EXPECT_LT(interior_error(apply_direct(u), [](std::size_t) { return 0.0; }, 1), 1e-10);
}

TEST(ApplyDirect, QuarticGaugeConvergesAtSecondOrder) {
    std::vector<double> err;
    for (int n : {16, 32, 64}) err.push_back(direct_quartic_error(n));
    const auto o = observed_orders(err);
    EXPECT_TRUE(orders_within(o, 1.8, 2.2)) << o[0] << " " << o[1];
}

TEST(ApplyComposed, LinearXIsZero) {
    const BoxGrid3 g(2, 2, 2, 12, 12, 12);
    const auto u = sample_xyt(g, [](double x, double, double) { return x; });
    EXPECT_LT(interior_error(apply_composed(u), [](std::size_t) { return 0.0; }, 2), 1e-10);
}

TEST(ApplyComposed, AgreesWithDirectOnGaussianAtSecondOrder) {
    std::vector<double> err;
    for (double h : {0.2, 0.1, 0.05}) err.push_back(cross_form_difference(h));
    EXPECT_TRUE(orders_within(observed_orders(err), 1.8, 2.2));
}

TEST(ApplyComposed, SelfAdjointAndNegativeSemidefinite) {
    const BoxGrid3 g(2, 2, 4, 16, 16, 16);
    const BoxSubLaplacian op(g, OperatorForm::composed);
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 100; ++rep) {
        const auto u = random_interior(g, rng, 2), v = random_interior(g, rng, 2);
        const double lhs = inner_product(op.apply(u), v), rhs = inner_product(u, op.apply(v));
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * l2_norm(u) * l2_norm(v));
        EXPECT_LE(inner_product(op.apply(u), u), 1e-12 * l2_norm(u) * l2_norm(u));
    }
}

TEST(ApplyComposed, GershgorinBoundsSpectralRadius) {
    const BoxGrid3 g(2, 2, 4, 10, 10, 10);
    const BoxSubLaplacian op(g, OperatorForm::composed);
    std::vector<double> v(g.size(), 1.0), w(g.size());
    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
        op.apply(v, w);
        double nw = 0.0;
        for (double x : w) nw += x * x;
        nw = std::sqrt(nw);
        double nv = 0.0;
        for (double x : v) nv += x * x;
        lambda = nw / std::sqrt(nv);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / nw;
    }
    EXPECT_LE(lambda, op.gershgorin_bound() * (1 + 1e-12));
}

TEST(ApplyCyl, QuadraticRadialIsExactly4N) {
    for (int n : {1, 2, 3}) {
        const CylGrid g(n, 2.0, 2.0, 12, 12);
        const auto u = sample_rt(g, [](double r, double) { return r * r; });
        EXPECT_LT(interior_error(apply_cyl(u), [&](std::size_t) { return 4.0 * n; }, 1), 1e-9) << "N=" << n;
    }
    const CylGrid g(1, 2.0, 2.0, 12, 12);
    const auto u = sample_rt(g, [](double r, double) { return r * r; });
    EXPECT_LT(interior_error(apply_cyl_flux(u), [](std::size_t) { return 4.0; }, 1), 1e-9);
}

TEST(ApplyCyl, LinearTauIsZero) {
    const CylGrid g(2, 2.0, 2.0, 12, 12);
    const auto u = sample_rt(g, [](double, double t) { return t; });
    EXPECT_LT(interior_error(apply_cyl(u), [](std::size_t) { return 0.0; }, 1), 1e-10);
    EXPECT_LT(interior_error(apply_cyl_flux(u), [](std::size_t) { return 0.0; }, 1), 1e-10);
}

TEST(ApplyCyl, QuarticGaugeConvergesAtSecondOrder) {
    for (int n : {1, 2}) {
        std::vector<double> err;
        for (int nr : {16, 32, 64}) err.push_back(cyl_quartic_error(n, nr));
        EXPECT_TRUE(orders_within(observed_orders(err), 1.8, 2.2)) << "N=" << n;
    }
}

TEST(ApplyCyl, FluxFormQuarticConvergesAtSecondOrder) {
    for (int n : {1, 2}) {
        std::vector<double> err;
        for (int nr : {16, 32, 64}) {
            const CylGrid g(n, 2.0, 2.0, nr, 2 * nr);
            const auto u = sample_rt(g, [](double r, double t) { return r * r * r * r + t * t; });
            const auto l = apply_cyl_flux(u);
            err.push_back(interior_error(l, [&](std::size_t a) {
                const double r = g.r(static_cast<int>(a / g.ntau));
                return (8.0 * n + 16.0) * r * r;
            }, 1));
        }
        EXPECT_TRUE(orders_within(observed_orders(err), 1.8, 2.2)) << "N=" << n;
    }
}

TEST(ApplyCyl, FluxFormIsSymmetricUnderRadialWeight) {
    const CylGrid g(2, 3.0, 3.0, 20, 24);
    const CylSubLaplacian op(g, OperatorForm::cylindrical_flux);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    for (int rep = 0; rep < 20; ++rep) {
        CylField u(g), v(g);
        for (auto& x : u.values) x = d(rng);
        for (auto& x : v.values) x = d(rng);
        const double lhs = inner_product(op.apply(u), v), rhs = inner_product(u, op.apply(v));
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * l2_norm(u) * l2_norm(v) * op.gershgorin_bound());
        EXPECT_LE(inner_product(op.apply(u), u), 0.0);
    }
}

TEST(ApplyCyl, MatchesDirectOnPartiallySymmetricGaussian) {
    std::vector<double> err;
    for (double h : {0.1, 0.05, 0.025}) err.push_back(cyl_direct_difference(h));
    EXPECT_TRUE(orders_within(observed_orders(err), 1.8, 2.2));
}

TEST(RadialProfile, Examples) {
    // phi(rho) = rho^4 at (1, 0, 0): phi' = 4, phi'' = 12, factor 1 (12 + 3 * 4) = 24
    EXPECT_NEAR(radial_profile_value(GroupPoint(1, 0, 0), 4.0, 12.0), 24.0, 1e-14);
    EXPECT_EQ(radial_profile_value(GroupPoint(0.3, 0.4, 0.7), 0.0, 0.0), 0.0);
    EXPECT_EQ(radial_profile_value(GroupPoint(0, 0, 2.0), 5.0, -3.0), 0.0);
    EXPECT_THROW(radial_profile_value(GroupPoint(0, 0, 0), 1.0, 1.0), std::invalid_argument);
}

TEST(RadialProfile, AgreesWithDirectOnQuarticAwayFromCentre) {
    const double x = 0.7, y = -0.4;
    const double r2 = x * x + y * y;
    const GroupPoint eta(x, y, 0.3);
    const double rho = gauge_norm(eta);
    const double v = radial_profile_value(eta, 4 * rho * rho * rho, 12 * rho * rho);
    EXPECT_NEAR(v, 24.0 * r2, 1e-12);
}

TEST(IdentityResiduals, TrivialCasesAreExactlyZero) {
    const auto rep = gaussian_identity(0.1, GroupPoint::identity(1), 1.0);
    EXPECT_GT(rep.evaluated, 0u);
    EXPECT_EQ(rep.left_invariance, 0.0);
    EXPECT_EQ(rep.homogeneity, 0.0);
}

TEST(IdentityResiduals, LeftInvarianceConvergesAtSecondOrder) {
    std::vector<double> err;
    for (double h : {0.2, 0.1, 0.05, 0.025}) err.push_back(gaussian_identity(h, GroupPoint(0.5, 0, 0), 1.0).left_invariance);
    EXPECT_TRUE(orders_within(observed_orders(err), 1.8, 2.2));
}

TEST(IdentityResiduals, HomogeneityOfQuarticIsSmall) {
    // For a quartic polynomial the stencil error is O(h^2); homogeneity residual scales with it.
    auto quartic = [](double x, double y, double t) {
        const double a = x * x + y * y;
        return a * a + t * t;
    };
    const BoxGrid3 probe(1, 1, 1, 5, 5, 5), domain(6, 6, 12, 5, 5, 5);
    std::vector<double> err;
    for (double h : {0.2, 0.1, 0.05}) {
        const auto rep = identity_residuals(quartic, GroupPoint::identity(1), 2.0, probe, domain, Spacing3{h, h, h});
        err.push_back(rep.homogeneity);
    }
    EXPECT_LT(err.back(), 1.0);
    EXPECT_TRUE(orders_within(observed_orders(err), 1.8, 2.2));
}

TEST(IdentityResiduals, EscapingStencilsAreFlagged) {
    const BoxGrid3 probe(1, 1, 1, 5, 5, 5), domain(1.05, 1.05, 1.05, 5, 5, 5);
    const auto rep = identity_residuals(detail::gaussian3, GroupPoint(0.5, 0, 0), 2.0, probe, domain,
                                        Spacing3{0.1, 0.1, 0.1});
    EXPECT_GT(rep.left_flagged, 0u);
    EXPECT_GT(rep.dilation_flagged, 0u);
}

TEST(VerifySuite, DefaultPasses) {
    const auto rep = run_verify_suite(VerifyConfig{});
    for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
    EXPECT_TRUE(rep.all_passed());
}

TEST(VerifySuite, MisSignedMixedTermIsDetected) {
    VerifyConfig cfg;
    cfg.fault_mixed_sign = -1.0;
    const auto rep = run_verify_suite(cfg);
    EXPECT_FALSE(rep.all_passed());
    for (const auto& c : rep.checks)
        if (c.name == "left_invariance_order" || c.name == "cross_form_direct_composed") {
            EXPECT_FALSE(c.passed) << c.name;
        }
}

TEST(Operators, RejectWrongFormsAndGrids) {
    const BoxGrid3 g(1, 1, 1, 6, 6, 6);
    EXPECT_THROW(BoxSubLaplacian(g, OperatorForm::cylindrical), std::invalid_argument);
    EXPECT_THROW(CylSubLaplacian(CylGrid(1, 1, 1, 6, 6), OperatorForm::direct), std::invalid_argument);
    const BoxSubLaplacian op(g);
    EXPECT_THROW(op.apply(BoxField(BoxGrid3(1, 1, 1, 7, 6, 6))), std::invalid_argument);
    BoxField bad(g);
    bad[3] = NAN;
    EXPECT_THROW(op.apply(bad), std::invalid_argument);
}
