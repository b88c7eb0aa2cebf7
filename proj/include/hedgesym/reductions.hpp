#pragma once

/**
 * @file reductions.hpp
 * @brief One-dimensional invariant reductions, reduced ODEs, closed-form
 * solutions and reconstruction of u(S, t).
 *
 * Cases and charts (Y = W'):
 *
 *     G_H2  generator V2 + eps V3 of L3      z = S,             u = W + eps t
 *     G_H3  generator V1 cos + V3 sin of L3  z = ln S - gamma t, u = S W
 *     S_H2  V1 cos + V4 sin of L4            z = ln S - gamma t, u = W
 *     S_H3  V2 + x (V1 cos + V4 sin)         z = ln S - gamma t, u = exp(W + delta t)
 *     S_H4  V3 + eps (V1 cos + V4 sin)       z = ln S - gamma t, u = W + eta t
 *
 * The G cases reduce the general model for any g; the S cases reduce the
 * haupt equation. The S cases are quadratic in Y'; the G cases are resolved
 * by bracketed scalar root finding. In G_H3 the slope of g is evaluated at
 * rho u_S = rho (W + Y), so the state is (Y, W); for exponential g the W
 * dependence drops out.
 */

#include "hedgesym/model_core.hpp"
#include "hedgesym/numerics.hpp"
#include "hedgesym/pde_ops.hpp"
#include "hedgesym/surface.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hedgesym {

enum class CaseId { G_H2, G_H3, S_H2, S_H3, S_H4 };

std::string to_string(CaseId c);
/// Accepts "g_h2", "G_H2", ... @throws ParamError otherwise.
CaseId parse_case(const std::string& s);
bool is_general_case(CaseId c);

struct ReductionCase {
    CaseId id = CaseId::S_H2;
    double sigma = 0.0;
    double phi = 0.0;  // G_H3, S_H2, S_H3, S_H4
    double x = 0.0;    // S_H3
    int eps = 1;       // G_H2, S_H4
    double c1 = 0.0;   // S cases (haupt)
    double rho = 0.0;  // G cases
    std::optional<ReactionFunction> g;  // G cases

    /// Throws TrivialCaseError / ParamError when the case invariants fail.
    void validate() const;

    /// The haupt parameters of an S case.
    SpecialParams haupt() const;
    /// The general-model parameters of a G case.
    ModelParams model() const;
};

struct DerivedParams {
    std::optional<double> gamma, beta, kappa, delta, eta, theta, zeta, a1;

    /// Throws ParamError naming the field if it is absent.
    static double need(const std::optional<double>& v, const char* name);

    /// {gamma, beta, kappa, delta, eta, theta, zeta, a1}; absent fields are null.
    nlohmann::json to_json() const;
};

/// @throws TrivialCaseError for sin(phi) = 0 or cos(phi) = 0 where phi is used,
/// ParamError for c1 = 0, x = 0 (S_H3), eps not +-1, or sigma <= 0.
DerivedParams derived_params(const ReductionCase& rc);

/// Invariant chart of a case.
class Chart {
public:
    explicit Chart(const ReductionCase& rc);

    CaseId id() const noexcept { return id_; }

    double z(double S, double t) const;
    /// W from (S, t, u). @throws DomainError for S <= 0 or (S_H3) u <= 0.
    double W(double S, double t, double u) const;
    /// Inverse: u from (S, t, W).
    double u(double S, double t, double W) const;
    /// u and its derivatives from W, Y = W' and Y' at z(S, t).
    Jet jet(double S, double t, double W, double Y, double Yp) const;

    nlohmann::json to_json() const;

private:
    CaseId id_;
    double gamma_ = 0.0;
    double delta_ = 0.0;
    double eta_ = 0.0;
    double eps_ = 0.0;
};

struct InvariantPoint {
    double z;
    double W;
};

InvariantPoint invariant_coords(const ReductionCase& rc, double S, double t, double u);

/// Roots of k^2 - k (2 beta + kappa) + (beta^2 + kappa) = 0, k1 <= k2.
/// @throws ComplexRootsError with the discriminant when it is negative.
std::array<double, 2> power_roots(double beta, double kappa);

enum class Branch { Plus, Minus };

std::string to_string(Branch b);
Branch parse_branch(const std::string& s);

enum class SolutionFamily { PowerOption, ExcludedH2, ExcludedH3, ExcludedH4, NumericalInvariant };

std::string to_string(SolutionFamily f);

struct ClosedFormSolution {
    SolutionFamily family;
    ReductionCase rc;
    double d1 = 0.0;
    double d2 = 0.0;
    std::optional<double> k;
    ClosedForm surface;
};

/// u = d1 S^k exp(-gamma k t) + d2 with k = k2 (Plus) or k1 (Minus).
ClosedFormSolution build_power_option(const ReductionCase& rc, Branch branch, double d1, double d2);

/// Same family with an explicit exponent (no check that k solves the quadratic).
ClosedForm power_option_surface(double gamma, double k, double d1, double d2);

/// Families on which the haupt denominator vanishes identically:
/// S_H2: d1 S^beta e^{-gamma beta t} + d2
/// S_H3: d1 S^beta e^{t (delta - beta gamma)} + d2 e^{delta t}
/// S_H4: d1 S^beta e^{-beta gamma t} + eta t d2
ClosedFormSolution excluded_family(const ReductionCase& rc, double d1, double d2);

/// Reduced first-order implicit ODE F(z, x, Y') = 0 of a case, x = (Y) or (Y, W).
class ReducedOde {
public:
    explicit ReducedOde(const ReductionCase& rc);

    const ReductionCase& reduction_case() const noexcept { return rc_; }
    const DerivedParams& params() const noexcept { return dp_; }

    /// 1, or 2 for G_H3 (Y, W).
    std::size_t state_size() const noexcept { return rc_.id == CaseId::G_H3 ? 2 : 1; }
    bool quadratic() const noexcept { return !is_general_case(rc_.id); }

    /// Residual as a polynomial in Y' (the denominators are multiplied out).
    double residual(double z, std::span<const double> x, double slope) const;

    /// Coefficients (a, b, c) of a Y'^2 + b Y' + c for the S cases.
    std::array<double, 3> coefficients(double Y) const;
    /// b^2 - 4ac in factored form.
    double discriminant(double Y) const;

    /// Slopes at (z, x). S cases: {plus, minus} from (-b +- sqrt(disc)) / (2a);
    /// G cases: every real root found in a wide logarithmic scan, ascending.
    /// @throws NoRealBranchError if there is none.
    std::vector<double> real_slopes(double z, std::span<const double> x) const;

    /// The slope selected by a branch label. For G cases Plus is the largest
    /// and Minus the smallest real root.
    double branch_slope(double z, std::span<const double> x, Branch b) const;

    /// Reduced image of the denominator guard (0 where the PDE's denominator vanishes).
    double guard_margin(double z, std::span<const double> x, double slope) const;

    /// Continuity-greedy resolver: the real root nearest `previous`.
    /// @throws NoRealBranchError, GuardError.
    SlopeChoice resolve(double z, std::span<const double> x, double previous) const;

    ImplicitSystem system() const;

private:
    void check_guard(double z, std::span<const double> x, double slope) const;

    ReductionCase rc_;
    DerivedParams dp_;
};

struct ReductionOptions {
    IvpOptions ivp{};
    Branch branch = Branch::Plus;
    std::optional<double> initial_slope;  // overrides `branch`
    double w0 = 0.0;                      // W(z0)
};

/// A solved reduction. Y and W are available at any z in the integrated range.
class Trajectory {
public:
    Trajectory(ReductionCase rc, IvpResult ivp, double w0);

    const ReductionCase& reduction_case() const noexcept { return rc_; }
    const IvpResult& ivp() const noexcept { return ivp_; }
    bool ok() const noexcept { return ivp_.ok(); }
    double z_begin() const { return ivp_.trajectory.z_begin(); }
    double z_end() const { return ivp_.trajectory.z_end(); }

    double Y(double z) const;
    /// Y' resolved from the reduced ODE at (z, Y(z)), on the root nearest the
    /// interpolant's derivative; the interpolant's derivative if none is real.
    double Yp(double z) const;
    /// W(z0) + integral of Y; G_H3 carries W in its state.
    double W(double z) const;

    /// Node table (z, Y, W).
    std::vector<std::array<double, 3>> table() const;
    /// `samples` points uniform in z over the integrated range.
    std::vector<std::array<double, 3>> resample(std::size_t samples) const;

private:
    ReductionCase rc_;
    ReducedOde ode_;
    IvpResult ivp_;
    double w0_;
    std::vector<double> w_nodes_;
};

/// Integrates the selected branch from (z0, Y0) to z1 (W(z0) = opt.w0).
/// A mid-trajectory loss of the real branch returns a partial trajectory whose
/// status is NoRealBranch; callers decide whether to throw.
Trajectory solve_reduction(const ReductionCase& rc, double z0, double z1, double Y0,
                           const ReductionOptions& opt = {});

/// u(S, t) through the chart; throws DomainError when z(S, t) is outside the trajectory.
ClosedForm numerical_invariant_surface(const Trajectory& tr);

/// Samples u(S, t) from a trajectory on a grid.
GridSurface reconstruct_grid(const Trajectory& tr, const SampleGrid& grid);

/// (S, t) rectangle with uniform axes whose z-image lies inside [z_lo, z_hi]
/// for a case with z = ln S - gamma t: S in [exp(z_lo + gamma t1), exp(z_hi + gamma t0)].
SampleGrid covered_grid(double gamma, double z_lo, double z_hi, double t0, double t1, std::size_t n_s,
                        std::size_t n_t);

}  // namespace hedgesym
