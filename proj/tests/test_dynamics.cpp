#include <gtest/gtest.h>

#include <cmath>

#include "heisenheat/dynamics.hpp"
#include "heisenheat/fit.hpp"
#include "heisenheat/lifespan.hpp"

using namespace heisenheat;

namespace {

ProblemSpec cyl_problem(double p, ForcingSpec f, InitialData init, CylGrid g) {
    ProblemSpec s;
    s.dims = GroupDims(g.n);
    s.p = p;
    s.forcing = std::move(f);
    s.init = init;
    s.grid = g;
    return s;
}

ProblemSpec ode_problem(double p, double a) {
    auto s = cyl_problem(p, ForcingSpec::zero(), InitialData::constant(a), CylGrid(1, 4, 4, 8, 8));
    s.diffusion = false;
    return s;
}

}  // namespace

TEST(Forcing, Examples) {
    const ForcingSpec z = ForcingSpec::zero();
    EXPECT_EQ(eval_forcing(z, GroupPoint(0.3, 1.0, -2.0)), 0.0);
    const auto s = ForcingSpec::singular_power(1.0, 2.5);
    // gauge 2 at (2, 0, 0)
    EXPECT_NEAR(eval_forcing(s, GroupPoint(2, 0, 0)), 0.03125, 1e-15);
    EXPECT_NEAR(eval_forcing(s, GroupPoint(0, 0, 4)), 0.03125, 1e-15);
    EXPECT_EQ(eval_forcing(s, GroupPoint(0.1, 0, 0)), 1.0);
    const auto r = ForcingSpec::regular_power(2.0, 6.0);
    EXPECT_NEAR(eval_forcing(r, GroupPoint(1, 0, 0)), 2.0 / 64.0, 1e-15);
    EXPECT_EQ(s.name(), "singular_power");
    EXPECT_EQ(ForcingSpec::gaussian_bump(1, 1).name(), "gaussian");
}

TEST(Forcing, ValidatesParameters) {
    EXPECT_THROW(ForcingSpec::singular_power(0.0, 2.5), std::invalid_argument);
    EXPECT_THROW(ForcingSpec::singular_power(1.0, 2.5, 0.5), std::invalid_argument);
    EXPECT_THROW(ForcingSpec::gaussian_bump(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(ForcingSpec::regular_power(-1.0, 6.0), std::invalid_argument);
}

TEST(Forcing, GaussianIntegralIsPositiveAndMatchesClosedForm) {
    const auto f = ForcingSpec::gaussian_bump(0.7, 1.3);
    const CylGrid g(1, 10.0, 20.0, 400, 800);
    const double q = integrate_cyl(sample_rt(g, [&](double r, double t) { return f.eval_rt(r, t); }));
    EXPECT_GT(q, 0.0);
    EXPECT_NEAR(q / f.total_integral(1), 1.0, 1e-4);
}

TEST(Forcing, PowerTotalsMatchQuadrature) {
    for (const auto& f : {ForcingSpec::singular_power(1.0, 2.5), ForcingSpec::regular_power(1.0, 6.0)}) {
        const double far = forcing_integral_truncated(f, 1e6, 1, {2000, 96, false}).value;
        EXPECT_NEAR(far / f.total_integral(1), 1.0, 2e-3) << f.name();
    }
    EXPECT_FALSE(ForcingSpec::singular_power(1.0, 1.5).integrable(1));
    EXPECT_TRUE(std::isinf(ForcingSpec::singular_power(1.0, 1.5).total_integral(1)));
}

TEST(TruncatedIntegral, ZeroForcingIsZero) {
    for (double r : {0.5, 2.0, 50.0}) EXPECT_EQ(forcing_integral_truncated(ForcingSpec::zero(), r, 1).value, 0.0);
    EXPECT_THROW(forcing_integral_truncated(ForcingSpec::zero(), 0.0, 1), std::invalid_argument);
}

TEST(TruncatedIntegral, GaussianIncreasesAndStabilizes) {
    const auto f = ForcingSpec::gaussian_bump(1.0, 1.0);
    const GaugePolarRule rule{2000, 256, false};
    double prev = 0.0;
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double v = forcing_integral_truncated(f, r, 1, rule).value;
        EXPECT_GT(v, prev);
        prev = v;
    }
    const double v16 = forcing_integral_truncated(f, 16.0, 1, rule).value;
    const double v32 = forcing_integral_truncated(f, 32.0, 1, rule).value;
    EXPECT_NEAR(v32 / v16, 1.0, 1e-6);
    EXPECT_NEAR(v32 / f.total_integral(1), 1.0, 1e-4);
}

TEST(TruncatedIntegral, SingularPowerTailDecaysLikeRToQMinus2Lambda) {
    const auto f = ForcingSpec::singular_power(1.0, 2.5);
    std::vector<ScalingSample> s;
    for (double r : {4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
        const double d = std::abs(forcing_integral_truncated(f, 2 * r, 1).value - forcing_integral_truncated(f, r, 1).value);
        s.push_back({r, d});
    }
    const auto fit = fit_exponent(s, -1.0);
    EXPECT_NEAR(fit.slope, -1.0, 0.2);
}

TEST(Step, ZeroIsAFixedPoint) {
    const CylGrid g(1, 4, 4, 10, 10);
    for (Scheme sc : {Scheme::imex, Scheme::explicit_euler}) {
        auto spec = cyl_problem(2.0, ForcingSpec::zero(), InitialData::zero(), g);
        spec.scheme = sc;
        if (sc == Scheme::explicit_euler) spec.cyl_form = OperatorForm::cylindrical;
        const auto out = step(CylField(g), 0.01, spec);
        EXPECT_EQ(linf_norm(out), 0.0);
    }
}

TEST(Step, LinearImexIsSupNonIncreasing) {
    const CylGrid g(1, 4, 4, 16, 16);
    auto spec = cyl_problem(2.0, ForcingSpec::zero(), InitialData::constant(1.0), g);
    spec.nonlinearity = false;
    CylField u(g, 1.0);
    double prev = linf_norm(u);
    for (int i = 0; i < 40; ++i) {
        u = step(u, 0.05, spec);
        const double s = linf_norm(u);
        EXPECT_LE(s, prev * (1 + 1e-12));
        prev = s;
    }
    EXPECT_LT(prev, 1.0);
}

TEST(Step, DifferenceQuotientMatchesRightHandSideAtFirstOrder) {
    const CylGrid g(1, 6, 12, 24, 48);
    const auto f = ForcingSpec::gaussian_bump(0.3, 1.0);
    const auto spec = cyl_problem(2.0, f, InitialData::zero(), g);
    const auto u = sample_rt(g, [](double r, double t) { return 0.5 * std::exp(-r * r - t * t / 2.0); });
    const auto lu = apply_cyl_flux(u);
    const auto fs = sample_forcing(spec, g);
    std::vector<double> err;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
        const auto up = step(u, dt, spec);
        double e = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double rhs = lu[i] + u[i] * u[i] + fs[i];
            e = std::max(e, std::abs((up[i] - u[i]) / dt - rhs));
        }
        err.push_back(e);
    }
    EXPECT_NEAR(std::log2(err[0] / err[1]), 1.0, 0.1);
    EXPECT_NEAR(std::log2(err[1] / err[2]), 1.0, 0.1);
}

TEST(Step, RejectsNonPositiveDt) {
    const CylGrid g(1, 4, 4, 8, 8);
    const auto spec = cyl_problem(2.0, ForcingSpec::zero(), InitialData::zero(), g);
    EXPECT_THROW(step(CylField(g), 0.0, spec), std::invalid_argument);
}

TEST(ProblemSpec, ValidationRules) {
    auto s = cyl_problem(1.0, ForcingSpec::zero(), InitialData::zero(), CylGrid(1, 4, 4, 8, 8));
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.p = 2.0;
    s.cyl_form = OperatorForm::cylindrical;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.scheme = Scheme::explicit_euler;
    EXPECT_NO_THROW(s.validate());
    s.dims = GroupDims(2);
    EXPECT_THROW(s.validate(), std::invalid_argument);
    ProblemSpec b;
    b.grid = BoxGrid3(2, 2, 2, 8, 8, 8);
    b.box_form = OperatorForm::direct;
    EXPECT_THROW(b.validate(), std::invalid_argument);
    b.box_form = OperatorForm::composed;
    EXPECT_NO_THROW(b.validate());
    EXPECT_DOUBLE_EQ(b.fujita_exponent(), 1.5);
    EXPECT_DOUBLE_EQ(b.second_exponent(), 2.0);
}

TEST(Explicit, ComparisonMonotonicity) {
    const CylGrid g(1, 4, 8, 16, 32);
    auto su = cyl_problem(2.0, ForcingSpec::gaussian_bump(0.1, 1.0), InitialData::gaussian(0.2, 1.0), g);
    auto sv = cyl_problem(2.0, ForcingSpec::gaussian_bump(0.3, 1.0), InitialData::gaussian(0.4, 1.0), g);
    for (auto* s : {&su, &sv}) {
        s->scheme = Scheme::explicit_euler;
        s->cyl_form = OperatorForm::cylindrical;
    }
    Evolution<CylGrid> eu(su, g), ev(sv, g);
    const double dt = eu.explicit_dt_bound();
    ASSERT_TRUE(std::isfinite(dt));
    auto u = eu.initial_values(), v = ev.initial_values();
    std::vector<double> un(u.size()), vn(v.size());
    for (int n = 0; n < 200; ++n) {
        eu.step(u, dt, un);
        ev.step(v, dt, vn);
        std::swap(u, un);
        std::swap(v, vn);
        for (std::size_t i = 0; i < u.size(); ++i) {
            ASSERT_GE(u[i], 0.0);
            ASSERT_LE(u[i], v[i]) << "step " << n << " node " << i;
        }
    }
}

TEST(Explicit, SolveRespectsStabilityBound) {
    const CylGrid g(1, 4, 8, 16, 32);
    auto s = cyl_problem(2.0, ForcingSpec::gaussian_bump(0.1, 1.0), InitialData::zero(), g);
    s.scheme = Scheme::explicit_euler;
    s.cyl_form = OperatorForm::cylindrical;
    SolveConfig c;
    c.t_end = 0.5;
    c.dt0 = 1.0;
    c.boundary_tol = 1.0;
    const auto o = solve_until(s, c);
    EXPECT_LE(o.max_accepted_dt, Evolution<CylGrid>(s, g).explicit_dt_bound() * (1 + 1e-12));
    EXPECT_EQ(o.status, SolveStatus::survived);
}

TEST(Imex, ForcingAmplitudeMonotonicity) {
    const CylGrid g(1, 6, 12, 24, 48);
    std::vector<double> prev;
    for (double a : {0.1, 0.2, 0.4}) {
        const auto s = cyl_problem(2.0, ForcingSpec::gaussian_bump(a, 1.0), InitialData::zero(), g);
        Evolution<CylGrid> e(s, g);
        auto u = e.initial_values();
        std::vector<double> un(u.size());
        for (int n = 0; n < 20; ++n) {
            e.step(u, 0.05, un);
            std::swap(u, un);
        }
        if (!prev.empty()) {
            for (std::size_t i = 0; i < u.size(); ++i) ASSERT_GE(u[i], prev[i]);
        }
        prev = u;
    }
}

TEST(Imex, LargerForcingBlowsUpEarlier) {
    const CylGrid g(1, 32, 128, 32, 64);
    double prev = INFINITY;
    for (double a : {4.0, 8.0, 16.0}) {
        const auto s = cyl_problem(2.0, ForcingSpec::gaussian_bump(a, 1.0), InitialData::zero(), g);
        SolveConfig c;
        c.t_end = 20;
        c.dt0 = 0.05;
        const auto o = solve_until(s, c);
        ASSERT_EQ(o.status, SolveStatus::blew_up) << o.reason;
        EXPECT_LT(o.t_upper, prev);
        prev = o.t_lower;
    }
}

TEST(SolveUntil, ZeroDataSurvivesWithZeroNorm) {
    const auto s = cyl_problem(1.5, ForcingSpec::zero(), InitialData::zero(), CylGrid(1, 4, 4, 10, 10));
    SolveConfig c;
    c.t_end = 1.0;
    c.dt0 = 0.1;
    const auto o = solve_until(s, c);
    EXPECT_EQ(o.status, SolveStatus::survived);
    EXPECT_EQ(o.final_sup, 0.0);
    EXPECT_DOUBLE_EQ(o.t_reached, 1.0);
}

TEST(SolveUntil, OdeLimitBracketsClosedFormBlowUp) {
    for (auto [p, a] : {std::pair{2.0, 1.0}, std::pair{3.0, 2.0}, std::pair{1.5, 1.0}}) {
        const double exact = 1.0 / ((p - 1.0) * std::pow(a, p - 1.0));
        SolveConfig c;
        c.t_end = 3.0 * exact;
        c.dt0 = 0.1 * exact;
        c.growth_cap = 1.01;
        const auto o = solve_until(ode_problem(p, a), c);
        ASSERT_EQ(o.status, SolveStatus::blew_up);
        const double slack = 2.0 * o.max_accepted_dt;
        EXPECT_LE(o.t_lower - slack, exact) << "p=" << p;
        EXPECT_GE(o.t_upper + slack, exact) << "p=" << p;
    }
}

TEST(SolveUntil, StepUnderflowDeclaresBlowUp) {
    SolveConfig c;
    c.t_end = 3.0;
    c.dt0 = 0.1;
    c.dt_min = 0.01;
    const auto o = solve_until(ode_problem(2.0, 1.0), c);
    EXPECT_EQ(o.status, SolveStatus::blew_up);
    EXPECT_EQ(o.reason, "step size underflow");
    EXPECT_LT(o.t_lower, 1.0 + 0.2);
    EXPECT_GT(o.t_upper, o.t_lower);
}

TEST(SolveUntil, BoundaryMassDowngradesToInconclusive) {
    const auto s = cyl_problem(1.5, ForcingSpec::gaussian_bump(1.0, 1.0), InitialData::zero(), CylGrid(1, 2, 2, 10, 10));
    SolveConfig c;
    c.t_end = 1.0;
    c.dt0 = 0.05;
    const auto o = solve_until(s, c);
    EXPECT_EQ(o.status, SolveStatus::inconclusive);
    EXPECT_EQ(o.reason, "boundary mass exceeded tolerance");
}

TEST(SolveUntil, RunsOnBoxAndHigherN) {
    SolveConfig c;
    c.t_end = 0.2;
    c.dt0 = 0.05;
    c.boundary_tol = 1.0;
    ProblemSpec b;
    b.p = 2.0;
    b.init = InitialData::gaussian(0.3, 1.0);
    b.grid = BoxGrid3(3, 3, 6, 16, 16, 16);
    EXPECT_EQ(solve_until(b, c).status, SolveStatus::survived);
    const auto s = cyl_problem(1.2, ForcingSpec::gaussian_bump(0.2, 1.0), InitialData::zero(), CylGrid(2, 4, 8, 16, 32));
    const auto o = solve_until(s, c);
    EXPECT_EQ(o.status, SolveStatus::survived);
    EXPECT_GT(o.final_sup, 0.0);
}

TEST(SolveConfig, Validation) {
    SolveConfig c;
    c.t_end = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SolveConfig{};
    c.growth_cap = 1.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SolveConfig{};
    c.t_end = 5.0;
    EXPECT_DOUBLE_EQ(c.effective_dt_min(), 5e-12);
}

TEST(Lifespan, TheoreticalExponent) {
    // mu = lambda_f - p/(p-1) = 2.5 - 3
    LifespanConfig cfg;
    cfg.scale_exponent = 1.0;
    EXPECT_DOUBLE_EQ(cfg.scale_for(0.1), 1.0);
    EXPECT_DOUBLE_EQ(cfg.scale_for(0.01), 10.0);
    EXPECT_DOUBLE_EQ(cfg.grid_for(0.01).tau_half, 24000.0);
    EXPECT_NEAR(cfg.grid_for(0.01).r_max, 64.0 * std::sqrt(10.0), 1e-9);
    const auto rep = measure_lifespan({}, 2.5, 1.5, GroupDims(1), cfg);
    EXPECT_DOUBLE_EQ(rep.lifespan_mu, -0.5);
    EXPECT_DOUBLE_EQ(rep.theoretical_slope, -2.0);
    EXPECT_FALSE(rep.fitted);
}

TEST(Lifespan, Preconditions) {
    LifespanConfig cfg;
    EXPECT_THROW(measure_lifespan({0.1}, 2.5, 2.5, GroupDims(1), cfg), std::invalid_argument);
    EXPECT_THROW(measure_lifespan({0.1}, 3.5, 1.5, GroupDims(1), cfg), std::invalid_argument);
    EXPECT_THROW(measure_lifespan({0.1}, 1.5, 1.5, GroupDims(1), cfg), std::invalid_argument);
    EXPECT_THROW(measure_lifespan({-0.1}, 2.5, 1.5, GroupDims(1), cfg), std::invalid_argument);
}

TEST(Lifespan, SmallSweepFitsAndIsWorkerIndependent) {
    LifespanConfig cfg;
    cfg.eps_ref = 1.0;
    cfg.base_grid = CylGrid(1, 32, 800, 48, 200);
    cfg.solve.t_end = 1e3;
    cfg.solve.dt0 = 0.1;
    const std::vector<double> eps = {1.0, 0.7, 0.5, 0.35};
    const auto a = measure_lifespan(eps, 2.5, 1.5, GroupDims(1), cfg);
    cfg.workers = 3;
    const auto b = measure_lifespan(eps, 2.5, 1.5, GroupDims(1), cfg);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].status, SolveStatus::blew_up) << a.rows[i].reason;
        EXPECT_EQ(a.rows[i].t_lower, b.rows[i].t_lower);
        EXPECT_EQ(a.rows[i].t_upper, b.rows[i].t_upper);
        if (i) {
            EXPECT_GT(a.rows[i].t_eps, a.rows[i - 1].t_eps);
        }
    }
}
