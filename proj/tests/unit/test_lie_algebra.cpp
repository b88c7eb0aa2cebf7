#include "hedgesym/errors.hpp"
#include "hedgesym/lie_algebra.hpp"
#include "hedgesym/pde_ops.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hedgesym;

namespace {

Rational R(long long n, long long d = 1) { return Rational(n, d); }

std::vector<Rational> unit(std::size_t dim, std::size_t k, Rational v) {
    std::vector<Rational> out(dim, R(0));
    out[k] = v;
    return out;
}

bool is_zero(const std::vector<Rational>& v) {
    for (const auto& r : v) {
        if (r != R(0)) return false;
    }
    return true;
}

// Power-option solution of haupt with Fig. 1 parameters.
struct PowerOption {
    double c1 = 2.1, phi = 1.17, sigma2 = 0.41036;
    double gamma = 1.0 / std::tan(phi);
    double beta = (c1 + 1) / c1;
    double kappa = sigma2 / (2 * gamma * c1 * c1);
    double k = beta + kappa / 2 - 0.5 * std::sqrt(kappa * (kappa + 4 * (beta - 1)));
    ClosedForm surface() const { return ClosedForm("po", PowerExpSeries{{{1.0, k, -gamma * k}}, 0.0, 0.0}); }
    SpecialParams haupt() const { return {SpecialModel::Haupt, std::sqrt(sigma2), c1}; }
};

}  // namespace

TEST(Commutator, BasicFields) {
    const auto g = generators(Basis::L4);
    // [S d/dS, d/dt] = 0, [u d/du, d/du] = -d/du
    EXPECT_TRUE(commutator(g[0], g[3]).is_zero());
    EXPECT_EQ(commutator(g[1], g[2]), -g[2]);
    EXPECT_EQ(commutator(g[2], g[1]), g[2]);
}

TEST(Commutator, AgreesWithDirectComputation) {
    // A = S d/dt, B = t d/du: [A, B] = A(t) d/du - B(S) d/dt = S d/du.
    ExactField A, B, expected;
    A.m[kT][kS] = R(1);
    B.m[kU][kT] = R(1);
    expected.m[kU][kS] = R(1);
    EXPECT_EQ(commutator(A, B), expected);
}

TEST(Structure, L3Table) {
    const auto t = structure_constants(Basis::L3);
    EXPECT_EQ(t.dim, 3u);
    EXPECT_EQ(t.bracket(0, 1), unit(3, 1, R(-1)));
    EXPECT_EQ(t.bracket(1, 0), unit(3, 1, R(1)));
    EXPECT_TRUE(is_zero(t.bracket(0, 2)));
    EXPECT_TRUE(is_zero(t.bracket(1, 2)));
    EXPECT_TRUE(t.antisymmetric());
    EXPECT_EQ(t.jacobi_defect(), R(0));
}

TEST(Structure, L4TableAsComputed) {
    const auto t = structure_constants(Basis::L4);
    EXPECT_EQ(t.dim, 4u);
    const auto nz = t.nonzero();
    ASSERT_EQ(nz.size(), 1u);
    EXPECT_EQ(nz[0].i, 2u);
    EXPECT_EQ(nz[0].j, 3u);
    EXPECT_EQ(nz[0].value, unit(4, 2, R(-1)));
    EXPECT_TRUE(t.antisymmetric());
    EXPECT_EQ(t.jacobi_defect(), R(0));
}

// The printed L4 table states [V1, V3] = -V3 and no other nonzero bracket. With
// V1 = S d/dS and V3 = d/du the two fields commute; the -V3 appears in [V2, V3].
TEST(Structure, PrintedL4BracketDoesNotHold) {
    const auto t = structure_constants(Basis::L4);
    EXPECT_TRUE(is_zero(t.bracket(0, 2)));
    EXPECT_NE(t.bracket(0, 2), unit(4, 2, R(-1)));
}

TEST(Structure, JsonAndText) {
    const auto t = structure_constants(Basis::L3);
    EXPECT_NE(t.to_text().find("-V2"), std::string::npos);
    EXPECT_EQ(t.to_json()["algebra"], "L3");
}

TEST(Basis, Expansion) {
    const auto g = generators(Basis::L4);
    const ExactField f = R(2) * g[0] + R(-1, 3) * g[3];
    EXPECT_EQ(expand_in_basis(f, g), (std::vector<Rational>{R(2), R(0), R(0), R(-1, 3)}));
    ExactField outside;
    outside.m[kT][kS] = R(1);
    EXPECT_THROW(expand_in_basis(outside, g), BasisError);
    EXPECT_THROW(parse_basis("L5"), ParamError);
}

TEST(Basis, Rendering) {
    EXPECT_EQ(to_string(generators(Basis::L3)[0]), "S*d/dS + u*d/du");
    EXPECT_EQ(to_string(generators(Basis::L4)[3]), "d/dt");
}

TEST(OptimalSystem, Sizes) {
    EXPECT_EQ(optimal_system(Basis::L3).size(), 6u);
    EXPECT_EQ(optimal_system(Basis::L4).size(), 12u);
    EXPECT_FALSE(decomposition_note(Basis::L4).empty());
}

TEST(Flow, GroupProperty) {
    const RealField V = l4_h3(0.7, 1.3);
    const Point3 p{2.0, 0.3, 1.5};
    const Point3 a = flow(V, 0.4, flow(V, 0.35, p));
    const Point3 b = flow(V, 0.75, p);
    EXPECT_NEAR(a.S, b.S, 1e-14);
    EXPECT_NEAR(a.t, b.t, 1e-14);
    EXPECT_NEAR(a.u, b.u, 1e-14);
    const Point3 id = flow(V, -0.75, b);
    EXPECT_NEAR(id.S, p.S, 1e-14);
    EXPECT_NEAR(id.u, p.u, 1e-14);
}

TEST(Flow, TangentMatchesField) {
    const RealField V = l4_h4(0.9, -1);
    const Point3 p{1.7, 0.2, -0.4};
    const double h = 1e-6;
    const Point3 a = flow(V, h, p), b = flow(V, -h, p);
    const std::array<double, 3> x{p.S, p.t, p.u};
    EXPECT_NEAR((a.S - b.S) / (2 * h), V.component(kS, x), 1e-8);
    EXPECT_NEAR((a.t - b.t) / (2 * h), V.component(kT, x), 1e-8);
    EXPECT_NEAR((a.u - b.u) / (2 * h), V.component(kU, x), 1e-8);
}

TEST(Flow, Unsupported) {
    RealField V;
    V.m[kS][kT] = 1.0;
    EXPECT_THROW(flow(V, 0.1, Point3{1, 1, 1}), UnsupportedFieldError);
}

// Property: every L4 generator maps the power-option solution to a solution.
TEST(Property, L4FlowsPreserveHauptSolutions) {
    const PowerOption po;
    const auto grid = SampleGrid::uniform(0.5, 20.0, 20, 0.1, 1.0, 10);
    for (const auto& V : generators(Basis::L4)) {
        for (double eps : {-1.0, -0.3, 0.6}) {
            const auto u = transform_solution(to_real(V), eps, po.surface());
            const auto rep = residual_special(po.haupt(), u, grid);
            EXPECT_LT(rep.max_residual, 1e-8) << to_string(V) << " eps " << eps;
        }
    }
}

// Property: every L3 generator maps a solution of the general model to a solution.
// u = S (Y (ln S - t) + w) solves it for exponential g when 2 (1 - rho c1 Y)^2 = sigma^2.
TEST(Property, L3FlowsPreserveGeneralSolutions) {
    const double rho = 0.1, c1 = 1.0, sigma2 = 0.16;
    const double Y = (1.0 - std::sqrt(sigma2 / 2.0)) / (rho * c1);
    const ClosedForm u("fixed point", JetFn([Y](double S, double t) {
                           const double L = std::log(S) - t;
                           return Jet{S * (Y * L + 0.5), -Y * S, Y * L + 0.5 + Y, Y / S};
                       }));
    const ReactionFunction g(Exponential{c1, 1.0});
    const ModelParams p(std::sqrt(sigma2), rho);
    const auto grid = SampleGrid::uniform(0.5, 5.0, 12, 0.0, 1.0, 6);
    EXPECT_LT(residual_general(g, p, u, grid).max_residual, 1e-12);
    for (const auto& V : generators(Basis::L3)) {
        for (double eps : {-0.8, 0.5}) {
            const auto v = transform_solution(to_real(V), eps, u);
            EXPECT_LT(residual_general(g, p, v, grid).max_residual, 1e-10) << to_string(V);
        }
    }
}

// Property: a solution invariant under a subalgebra is a fixed point of its flow.
TEST(Property, PowerOptionIsInvariantUnderH2) {
    const PowerOption po;
    const auto v = transform_solution(l4_h2(po.phi), 0.37, po.surface());
    for (double S : {0.5, 3.0, 40.0}) {
        for (double t : {0.2, 0.9}) {
            const double a = po.surface().value(S, t);
            EXPECT_NEAR(std::get<ClosedForm>(v).value(S, t), a, 1e-12 * std::abs(a));
        }
    }
}

TEST(Transform, GridIsRemapped) {
    const ClosedForm f("q", PowerExpSeries{{{1.0, 2.0, 0.0}}, 0.0, 0.0});
    const GridSurface g = sample(f, SampleGrid::uniform(1.0, 2.0, 5, 0.0, 1.0, 5));
    const auto moved = std::get<GridSurface>(transform_solution(to_real(generators(Basis::L4)[3]), 0.5, g));
    EXPECT_NEAR(moved.t().front(), 0.5, 1e-15);
    EXPECT_EQ(moved.u(), g.u());
}

TEST(Subalgebras, Composition) {
    const double phi = 0.6;
    const RealField h2 = l4_h2(phi);
    EXPECT_NEAR(h2.m[kS][kS], std::cos(phi), 1e-15);
    EXPECT_NEAR(h2.a0[kT], std::sin(phi), 1e-15);
    const RealField h4 = l4_h4(phi, -1);
    EXPECT_NEAR(h4.a0[kU], 1.0, 1e-15);
    EXPECT_NEAR(h4.m[kS][kS], -std::cos(phi), 1e-15);
    const RealField h3 = l3_h3(1);
    EXPECT_NEAR(h3.a0[kU], 1.0, 1e-15);
    EXPECT_NEAR(h3.a0[kT], 1.0, 1e-15);
}
