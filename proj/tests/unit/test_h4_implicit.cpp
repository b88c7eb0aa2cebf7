#include "hedgesym/errors.hpp"
#include "hedgesym/h4_implicit.hpp"
#include "hedgesym/pde_ops.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace hedgesym;

namespace {

ReductionCase fig2_case(int eps = 1) {
    ReductionCase rc;
    rc.id = CaseId::S_H4;
    rc.c1 = 10.0;
    rc.eps = eps;
    rc.phi = std::numbers::pi / 4;
    rc.sigma = std::sqrt(0.02);
    return rc;
}

H4Constants fig2_constants(int eps = 1) { return H4Constants::from(derived_params(fig2_case(eps))); }

double fd5(const std::function<double(double)>& f, double Y) {
    const double h = 1e-4 * Y;
    return (-f(Y + 2 * h) + 8 * f(Y + h) - 8 * f(Y - h) + f(Y - 2 * h)) / (12 * h);
}

}  // namespace

TEST(Constants, Fig2) {
    const auto c = fig2_constants();
    EXPECT_NEAR(c.m(), 1.21 + 1e-4, 1e-15);
    EXPECT_NEAR(c.y_star(), 1.21 * std::sqrt(2.0) / (1.21 + 1e-4), 1e-14);
    ReductionCase h2 = fig2_case();
    h2.id = CaseId::S_H2;
    EXPECT_THROW(H4Constants::from(derived_params(h2)), ParamError);
}

TEST(Implicit, ClosedFormIsSelected) {
    const H4Implicit h(fig2_constants());
    EXPECT_EQ(h.mode(), H4Mode::ClosedForm);
    EXPECT_LT(h.validation_error(), 1e-8);
    EXPECT_NEAR(h.segment_lower(), std::sqrt(2.0), 1e-14);
    const auto crit = h.critical_points();
    ASSERT_EQ(crit.size(), 3u);
    EXPECT_LT(crit[0], crit[1]);
    EXPECT_LT(crit[1], crit[2]);
}

TEST(Implicit, DerivativeMatchesIntegrand) {
    const auto c = fig2_constants();
    const H4Implicit h(c);
    for (int i = 0; i <= 60; ++i) {
        const double Y = 1.45 * std::pow(30.0 / 1.45, i / 60.0);
        const double fd = fd5([&](double y) { return h.z(y); }, Y);
        const double f = h4_integrand(c, Y);
        EXPECT_NEAR(fd, f, 1e-8 * std::max(1.0, std::abs(f))) << "Y = " << Y;
    }
}

// The antiderivative with the last-logarithm coefficient as printed misses the
// integrand by far more than the 1e-8 check allows.
TEST(Implicit, PrintedAntiderivativeDeviates) {
    const auto c = fig2_constants();
    const double scale = 2 * c.beta * c.m();
    const double fd = fd5([&](double y) { return h4_antiderivative_printed(c, y) / scale; }, 1.5);
    EXPECT_GT(std::abs(fd - h4_integrand(c, 1.5)), 1e-7);
}

// The integrand printed beside the integral, 2A / sqrt(R), is not dz/dY of the reduced ODE.
TEST(Implicit, PrintedIntegrandIsNotTheSlopeInverse) {
    const auto c = fig2_constants();
    const ReducedOde ode(fig2_case());
    const double Y = 2.0;
    const std::vector<double> x{Y};
    // The implicit solution traces the root labelled Minus ((-b - sqrt(disc)) / 2a, a < 0).
    const double slope = ode.branch_slope(0.0, x, Branch::Minus);
    EXPECT_NEAR(h4_integrand(c, Y) * slope, 1.0, 1e-10);
    EXPECT_GT(std::abs(h4_integrand_printed(c, Y) * slope - 1.0), 1.0);
}

TEST(Implicit, InversionRoundTrip) {
    const H4Implicit h(fig2_constants());
    for (double z = 0.4; z <= 3.4; z += 0.25) EXPECT_NEAR(h.z(h.invert(z)), z, 1e-12);
    EXPECT_THROW(h.invert(0.2), BracketError);
}

TEST(Implicit, DomainBelowBranchPoint) {
    EXPECT_THROW(implicit_solution_h4(derived_params(fig2_case()), 0.1), DomainError);
    EXPECT_NO_THROW(implicit_solution_h4(derived_params(fig2_case()), 2.0));
}

TEST(Implicit, QuadratureAgreesWithClosedForm) {
    const auto c = fig2_constants();
    const H4Implicit closed(c), quad(c, 0.0, true);
    EXPECT_EQ(quad.mode(), H4Mode::Quadrature);
    for (double Y : {1.6, 3.0, 12.0, 30.0}) {
        EXPECT_NEAR(quad.z(Y) - quad.z(2.0), closed.z(Y) - closed.z(2.0), 1e-9);
    }
}

TEST(Implicit, NegativeEtaUsesQuadrature) {
    const auto c = fig2_constants(-1);
    const H4Implicit h(c, 0.5);
    EXPECT_EQ(h.mode(), H4Mode::Quadrature);
    EXPECT_EQ(h.segment_lower(), 0.0);
    EXPECT_NEAR(h.z(1.0), -0.5 / (2 * c.beta * c.m()), 1e-15);
    double prev = h.z(0.05);
    for (double Y = 0.1; Y < 40.0; Y *= 1.5) {
        const double z = h.z(Y);
        EXPECT_GT(z, prev);
        prev = z;
        EXPECT_NEAR(h.invert(z), Y, 1e-10 * Y);
    }
}

TEST(Curve, Fig2Window) {
    const H4Implicit h(fig2_constants());
    const auto curve = h4_curve(h, 0.4, 3.4, 30.0, 200);
    ASSERT_EQ(curve.size(), 200u);
    EXPECT_EQ(curve.front()[0], 0.4);
    EXPECT_EQ(curve.back()[1], 30.0);
    for (std::size_t i = 1; i < curve.size(); ++i) {
        EXPECT_GT(curve[i][0], curve[i - 1][0]);
        EXPECT_GT(curve[i][1], curve[i - 1][1]);
    }
    for (const auto& p : curve) {
        EXPECT_GT(p[1], 0.1);
        EXPECT_LE(p[1], 30.0);
    }
}

TEST(Reconstruction, GridResidual) {
    const ReductionCase rc = fig2_case();
    const H4Implicit h(H4Constants::from(derived_params(rc)));
    const auto grid = SampleGrid::log_uniform(std::exp(0.4 + 1.0), std::exp(3.4), 2000, 0.0, 1.0, 201);
    const GridSurface u = invert_and_reconstruct(h, grid);
    const auto rep = evaluate_special(rc.haupt(), u);
    EXPECT_EQ(rep.guard_violations, 0u);
    EXPECT_LT(rep.rms_residual, 1e-4);
}

TEST(Reconstruction, WIncrementIsIntegralOfY) {
    // dW/dz = Y, checked by differencing the increment in z.
    const H4Implicit h(fig2_constants());
    const double z = 1.7, dz = 1e-4;
    const double Y = h.invert(z);
    const double dW = h4_w_increment(h, h.invert(z - dz), h.invert(z + dz)) / (2 * dz);
    EXPECT_NEAR(dW, Y, 1e-6);
}

TEST(Euler, CorrectedConstants) {
    const auto c = fig2_constants();
    const auto taus = default_tau_samples(c.theta);
    ASSERT_EQ(taus.size(), 100u);
    for (int s : {1, -1}) EXPECT_LT(euler_substitution_check(c, taus, s), 1e-9);
}

// The printed constants b2 = 2 beta/(theta zeta), b0 = kappa + 2 beta gamma - 2 beta/zeta
// only hold for eta = 1; Fig. 2 has eta = sqrt(2).
TEST(Euler, PrintedConstantsNeedUnitEta) {
    const auto c = fig2_constants();
    const auto taus = default_tau_samples(c.theta);
    EXPECT_GT(euler_substitution_check(c, taus, 1, true), 1e-3);
    H4Constants cu = c;
    cu.eta = 1.0;
    cu.zeta = 4 * (c.beta - 1) * cu.eta / (4 * (c.beta - 1) * c.gamma + c.kappa);
    cu.a1 = cu.theta * cu.zeta;
    const auto tu = default_tau_samples(cu.theta);
    EXPECT_LT(euler_substitution_check(cu, tu, 1, true), 1e-9);
}

TEST(Euler, SH3Identity) {
    ReductionCase rc = fig2_case();
    rc.id = CaseId::S_H3;
    rc.x = 1.0;
    const auto d = derived_params(rc);
    const auto taus = default_tau_samples(*d.theta);
    for (int s : {1, -1}) EXPECT_LT(euler_substitution_check_h3(d, taus, s), 1e-9);
}

TEST(Euler, Degenerate) {
    auto c = fig2_constants();
    const std::vector<double> bad{std::sqrt(c.theta)};
    EXPECT_THROW(euler_substitution_check(c, bad, 1), DomainError);
    c.zeta = 0.0;
    const std::vector<double> taus{0.001};
    EXPECT_THROW(euler_substitution_check(c, taus, 1), ParamError);
}
