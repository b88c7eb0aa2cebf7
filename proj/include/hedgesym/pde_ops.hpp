#pragma once

/**
 * @file pde_ops.hpp
 * @brief Residuals of the hedging PDEs with the denominator-positivity guard.
 *
 * General model, with lambda = g'/g:
 *
 *     u_t + sigma^2 S^2 u_SS / (2 (1 - rho lambda(rho u_S) S u_SS)^2) = 0
 *
 * Special models:
 *
 *     frey   u_t + sigma^2 S^2 u_SS / (2 (1 - rho c1 S u_SS)^2)
 *     haupt  u_t + sigma^2 S^2 u_SS u_S^2 / (2 (u_S - c1 S u_SS)^2)
 *     sipa   u_t + sigma^2 (1 + k u_S)^2 S^2 u_SS / (2 c1^2 (1 + k u_S + (k/c1) S u_SS)^2)
 *
 * A point is flagged when |denominator| < 1e-10 (1 + |sigma^2 S^2 u_SS|).
 * Points with u_SS == 0 are never flagged: the nonlinear term vanishes there.
 * Flagged points are excluded from the norms and counted.
 */

#include "hedgesym/model_core.hpp"
#include "hedgesym/surface.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace hedgesym {

enum class SpecialModel { Frey, Haupt, Sipa };

std::string to_string(SpecialModel m);

/// Parameters of a special model. frey uses (sigma, rho, c1); haupt uses
/// (sigma, c1); sipa uses (sigma, c1, k).
struct SpecialParams {
    SpecialModel model;
    double sigma;
    double c1;
    double rho = 0.0;
    double k = 0.0;

    /// @throws ParamError on sigma <= 0, c1 == 0 (haupt, sipa), k == 0 (sipa), rho < 0.
    void validate() const;
};

inline constexpr double kGuardTolerance = 1e-10;

struct PointResidual {
    double residual = 0.0;
    double margin = 0.0;  // the model's denominator before squaring
    bool flagged = false;
};

PointResidual residual_general_at(const ReactionFunction& g, const ModelParams& p, double S, const Jet& j);
PointResidual residual_special_at(const SpecialParams& p, double S, const Jet& j);

struct ResidualPoint {
    double S;
    double t;
    double residual;
    double margin;
    bool flagged;
};

struct ResidualReport {
    std::vector<ResidualPoint> points;  // interior points in (t, S) order
    double max_residual = 0.0;
    double rms_residual = 0.0;
    std::size_t guard_violations = 0;
    std::size_t n_interior = 0;

    /// {max_residual, rms_residual, guard_violations, n_interior}
    nlohmann::json to_json() const;
};

/// Interior derivative fields of a grid surface. Arrays are t-major over the
/// (n_S - 2) x (n_t - 2) interior lattice.
struct GridDerivatives {
    std::vector<double> S;
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> u_t;
    std::vector<double> u_S;
    std::vector<double> u_SS;

    Jet jet(std::size_t iS, std::size_t it) const;
};

/// Second-order central differences on uniform axes, three-point nonuniform
/// stencils otherwise. @throws GridError for fewer than 5 points per axis.
GridDerivatives grid_derivatives(const GridSurface& u);

/// Evaluators that always return the report (no GuardError). Closed forms
/// are sampled on `grid` with analytic derivatives; every grid point counts
/// as interior. Grid surfaces use finite differences and ignore `grid`.
ResidualReport evaluate_general(const ReactionFunction& g, const ModelParams& p, const SolutionSurface& u,
                                const SampleGrid& grid = {});
ResidualReport evaluate_special(const SpecialParams& p, const SolutionSurface& u, const SampleGrid& grid = {});

/// As the evaluators, but throw GuardError (with the counts) when every
/// interior point violates the guard.
ResidualReport residual_general(const ReactionFunction& g, const ModelParams& p, const SolutionSurface& u,
                                const SampleGrid& grid = {});
ResidualReport residual_special(const SpecialParams& p, const SolutionSurface& u, const SampleGrid& grid = {});

/// Linear Black-Scholes operator u_t + sigma^2 S^2 u_SS / 2.
double black_scholes_residual(double sigma, double S, const Jet& j);

}  // namespace hedgesym
