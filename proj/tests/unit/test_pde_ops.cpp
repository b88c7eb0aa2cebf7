#include "hedgesym/errors.hpp"
#include "hedgesym/pde_ops.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hedgesym;

namespace {

// Random smooth surfaces a S^p e^{q t} + b S + c with u_S > 0 on S in [0.5, 3].
std::vector<PowerExpSeries> random_surfaces(std::size_t n) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> coef(0.2, 2.0), power(1.2, 3.0), rate(-0.5, 0.5), lin(0.1, 1.0);
    std::vector<PowerExpSeries> out;
    for (std::size_t i = 0; i < n; ++i) {
        PowerExpSeries s;
        s.terms.push_back({coef(rng), power(rng), rate(rng)});
        s.terms.push_back({lin(rng), 1.0, 0.0});
        s.constant = coef(rng);
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(BlackScholes, DegenerationAtZeroRho) {
    const double sigma = 0.3;
    const ReactionFunction g(Exponential{1.0, 1.0});
    const ModelParams p(sigma, 0.0);
    PowerExpSeries lin{{{1.0, 1.0, 0.0}}, 0.0, 0.0};
    PowerExpSeries quad{{{1.0, 2.0, -sigma * sigma}}, 0.0, 0.0};
    for (const auto& s : {lin, quad}) {
        for (double S : {0.1, 1.0, 7.0}) {
            for (double t : {0.0, 0.4}) {
                const Jet j = s.jet(S, t);
                const auto r = residual_general_at(g, p, S, j);
                EXPECT_NEAR(r.residual, black_scholes_residual(sigma, S, j), 1e-12);
                EXPECT_NEAR(r.residual, 0.0, 1e-12);
            }
        }
    }
}

TEST(BlackScholes, ZeroRhoSkipsPowerAtOrigin) {
    // Power g has g(0) = 0; with rho = 0 the feedback is zero without evaluating g.
    const ReactionFunction g(Power{0.5, 1.0});
    const Jet j{1.0, -0.1, 0.0, 2.0};
    const auto r = residual_general_at(g, ModelParams(0.2, 0.0), 1.0, j);
    EXPECT_NEAR(r.residual, black_scholes_residual(0.2, 1.0, j), 1e-15);
}

TEST(Consistency, HauptEqualsGeneralPower) {
    const double sigma = 0.4, c1 = 2.1, rho = 0.3;
    const ReactionFunction g(Power{c1, 1.7});
    const SpecialParams sp{SpecialModel::Haupt, sigma, c1};
    for (const auto& s : random_surfaces(20)) {
        for (double S : {0.5, 1.0, 2.0, 3.0}) {
            const Jet j = s.jet(S, 0.3);
            const auto a = residual_special_at(sp, S, j);
            const auto b = residual_general_at(g, ModelParams(sigma, rho), S, j);
            if (a.flagged || b.flagged) continue;
            EXPECT_NEAR(a.residual, b.residual, 1e-12 * std::max(1.0, std::abs(a.residual)));
        }
    }
}

TEST(Consistency, FreyEqualsGeneralExponential) {
    const double sigma = 0.25, c1 = 0.8, rho = 0.05;
    const ReactionFunction g(Exponential{c1, 3.0});
    const SpecialParams sp{SpecialModel::Frey, sigma, c1, rho};
    for (const auto& s : random_surfaces(20)) {
        for (double S : {0.5, 1.0, 2.0, 3.0}) {
            const Jet j = s.jet(S, 0.7);
            const auto a = residual_special_at(sp, S, j);
            const auto b = residual_general_at(g, ModelParams(sigma, rho), S, j);
            if (a.flagged || b.flagged) continue;
            EXPECT_NEAR(a.residual, b.residual, 1e-12 * std::max(1.0, std::abs(a.residual)));
        }
    }
}

// The sipa residual taken as printed is the general model with the fractional
// power g except that its diffusion term carries an extra 1/c1^2.
TEST(Consistency, SipaDiffersFromGeneralByInverseC1Squared) {
    const double sigma = 0.3, c1 = 0.5, k = 2.0, rho = 1.0;
    const ReactionFunction g(FractionalPower{c1, 1.0, k, rho});
    const SpecialParams sp{SpecialModel::Sipa, sigma, c1, 0.0, k};
    const Jet j{1.0, 0.0, 0.4, 0.2};
    const double S = 1.3;
    const double special = residual_special_at(sp, S, j).residual;
    const double general = residual_general_at(g, ModelParams(sigma, rho), S, j).residual;
    EXPECT_NEAR(special, general / (c1 * c1), 1e-12);
}

TEST(Guard, FlagsVanishingDenominator) {
    const double rho = 0.5, c1 = 2.0, S = 1.0;
    const SpecialParams frey{SpecialModel::Frey, 0.3, c1, rho};
    const Jet j{0.0, 0.0, 1.0, 1.0 / (rho * c1 * S)};
    const auto r = residual_special_at(frey, S, j);
    EXPECT_TRUE(r.flagged);
    EXPECT_TRUE(std::isnan(r.residual));
    EXPECT_NEAR(r.margin, 0.0, 1e-15);
}

TEST(Guard, FlatSurfaceNeverFlagged) {
    const SpecialParams haupt{SpecialModel::Haupt, 0.3, 2.0};
    const auto r = residual_special_at(haupt, 1.0, Jet{7.0, 0.0, 0.0, 0.0});
    EXPECT_FALSE(r.flagged);
    EXPECT_EQ(r.residual, 0.0);
}

TEST(Guard, AllFlaggedThrows) {
    // u = S^beta: haupt denominator u_S - c1 S u_SS vanishes identically for beta = (c1+1)/c1.
    const double c1 = 2.0, beta = 1.5;
    const ClosedForm u("excluded", PowerExpSeries{{{1.0, beta, 0.0}}, 0.0, 0.0});
    const SpecialParams p{SpecialModel::Haupt, 0.3, c1};
    const auto grid = SampleGrid::uniform(0.5, 2.0, 10, 0.0, 1.0, 5);
    const auto rep = evaluate_special(p, u, grid);
    EXPECT_EQ(rep.guard_violations, rep.n_interior);
    EXPECT_EQ(rep.n_interior, 50u);
    try {
        residual_special(p, u, grid);
        FAIL() << "expected GuardError";
    } catch (const GuardError& e) {
        EXPECT_EQ(e.violations(), 50u);
        EXPECT_EQ(e.n_interior(), 50u);
    }
}

TEST(SpecialParams, Validation) {
    EXPECT_THROW((SpecialParams{SpecialModel::Haupt, 0.3, 0.0}.validate()), ParamError);
    EXPECT_THROW((SpecialParams{SpecialModel::Sipa, 0.3, 0.5, 0.0, 0.0}.validate()), ParamError);
    EXPECT_THROW((SpecialParams{SpecialModel::Frey, -0.3, 0.5, 0.1}.validate()), ParamError);
    EXPECT_THROW((SpecialParams{SpecialModel::Frey, 0.3, 0.5, -0.1}.validate()), ParamError);
}

TEST(GridDerivatives, ExactOnQuadraticsUniform) {
    const ClosedForm f("q", PowerExpSeries{{{1.0, 2.0, 0.0}, {3.0, 1.0, 0.0}}, 0.5, 0.0});
    const GridSurface g = sample(f, SampleGrid::uniform(1.0, 2.0, 11, 0.0, 1.0, 6));
    const GridDerivatives d = grid_derivatives(g);
    ASSERT_EQ(d.S.size(), 9u);
    ASSERT_EQ(d.t.size(), 4u);
    for (std::size_t it = 0; it < d.t.size(); ++it) {
        for (std::size_t iS = 0; iS < d.S.size(); ++iS) {
            const Jet j = d.jet(iS, it);
            EXPECT_NEAR(j.u_S, 2 * d.S[iS] + 3.0, 1e-11);
            EXPECT_NEAR(j.u_SS, 2.0, 1e-9);
            EXPECT_NEAR(j.u_t, 0.5, 1e-11);
        }
    }
}

TEST(GridDerivatives, ExactOnQuadraticsNonuniform) {
    const ClosedForm f("q", PowerExpSeries{{{1.0, 2.0, 0.0}}, 0.0, 0.0});
    const GridSurface g = sample(f, SampleGrid::log_uniform(1.0, 10.0, 12, 0.0, 1.0, 5));
    const GridDerivatives d = grid_derivatives(g);
    for (std::size_t iS = 0; iS < d.S.size(); ++iS) {
        EXPECT_NEAR(d.jet(iS, 1).u_S, 2 * d.S[iS], 1e-10);
        EXPECT_NEAR(d.jet(iS, 1).u_SS, 2.0, 1e-9);
    }
}

TEST(GridDerivatives, TooFewPoints) {
    const ClosedForm f("q", PowerExpSeries{{}, 0.0, 1.0});
    EXPECT_THROW(grid_derivatives(sample(f, SampleGrid::uniform(1.0, 2.0, 4, 0.0, 1.0, 6))), GridError);
}

TEST(Evaluate, ClosedFormPowerOptionSolvesHaupt) {
    // u = S^k e^{-gamma k t} solves haupt when k^2 - k(2 beta + kappa) + beta^2 + kappa = 0.
    const double c1 = 2.1, phi = 1.17, s2 = 0.41036;
    const double gamma = 1.0 / std::tan(phi), beta = (c1 + 1) / c1, kappa = s2 / (2 * gamma * c1 * c1);
    const double k = beta + kappa / 2 + 0.5 * std::sqrt(kappa * (kappa + 4 * (beta - 1)));
    const ClosedForm u("po", PowerExpSeries{{{1.0, k, -gamma * k}}, 0.0, 0.0});
    const auto rep = residual_special(SpecialParams{SpecialModel::Haupt, std::sqrt(s2), c1}, u,
                                      SampleGrid::uniform(0.1, 100.0, 100, 0.1, 1.0, 50));
    EXPECT_EQ(rep.guard_violations, 0u);
    EXPECT_LT(rep.max_residual, 1e-8);
    EXPECT_EQ(rep.points.size(), 5000u);
    const auto j = rep.to_json();
    EXPECT_TRUE(j.contains("max_residual") && j.contains("rms_residual") && j.contains("guard_violations") &&
                j.contains("n_interior"));
}

TEST(Evaluate, GridOfConstantSurface) {
    const GridSurface g(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{0, 1, 2, 3, 4},
                        std::vector<double>(25, 7.0));
    const auto rep = evaluate_special(SpecialParams{SpecialModel::Haupt, 0.2, 2.0}, g);
    EXPECT_EQ(rep.n_interior, 9u);
    EXPECT_EQ(rep.guard_violations, 0u);
    EXPECT_EQ(rep.max_residual, 0.0);
}
