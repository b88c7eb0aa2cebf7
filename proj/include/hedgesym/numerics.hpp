#pragma once

/**
 * @file numerics.hpp
 * @brief Scalar root finding, adaptive quadrature and embedded Runge-Kutta IVPs.
 *
 * Every kernel is deterministic and free of global state.
 *
 * The IVP solver has two modes. The explicit mode integrates x' = f(z, x).
 * The implicit mode integrates a state whose first component y is defined by
 * a residual F(z, x, y') = 0 that has to be solved for the slope at every
 * Runge-Kutta stage; the remaining components ("auxiliary") have explicit
 * derivatives that may depend on the resolved slope. The default slope
 * resolver scans a bracket around the previous stage's slope and refines
 * each sign change with find_root_bracketed, keeping the root closest to the
 * previous slope.
 */

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hedgesym {

struct ToleranceSpec {
    double atol = 1e-10;
    double rtol = 1e-8;
    int max_iter = 200;
    int max_depth = 50;

    /// Throws ParamError unless all positive and max_iter >= 10.
    void validate() const;
};

using ScalarFn = std::function<double(double)>;

/// Root of f in [lo, hi] with f(lo) * f(hi) <= 0. The result never leaves the
/// bracket; on return either |f(x)| <= atol or the final bracket is no wider
/// than rtol * |x| + atol.
/// @throws BracketError if f(lo) and f(hi) have the same sign.
/// @throws ConvergenceError after tol.max_iter iterations.
double find_root_bracketed(const ScalarFn& f, double lo, double hi, const ToleranceSpec& tol = {});

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;  // false when the subdivision limit was hit
};

/// Adaptive Gauss-Kronrod (7/15) with recursive interval halving.
/// Endpoints are never evaluated.
QuadratureResult adaptive_quadrature(const ScalarFn& f, double a, double b,
                                     const ToleranceSpec& tol = {});

/// Like adaptive_quadrature but throws ConvergenceError when not converged.
double integrate(const ScalarFn& f, double a, double b, const ToleranceSpec& tol = {});

using State = std::vector<double>;

/// Accepted Runge-Kutta nodes with the quartic continuous extension of
/// Dormand-Prince between them (cubic Hermite where no extension is stored).
class DenseTrajectory {
public:
    DenseTrajectory() = default;

    /// `extra` is the quartic coefficient of the segment ending at z (empty: Hermite).
    void push(double z, State x, State dx, State extra = {});

    bool empty() const noexcept { return z_.empty(); }
    std::size_t size() const noexcept { return z_.size(); }
    std::size_t dimension() const noexcept { return x_.empty() ? 0 : x_.front().size(); }

    double z_begin() const { return z_.front(); }
    double z_end() const { return z_.back(); }

    const std::vector<double>& nodes() const noexcept { return z_; }
    const State& node_state(std::size_t i) const { return x_[i]; }
    const State& node_derivative(std::size_t i) const { return dx_[i]; }

    /// Component `comp` at z; z must lie within the integrated range.
    double value(double z, std::size_t comp = 0) const;
    double derivative(double z, std::size_t comp = 0) const;

private:
    std::size_t segment(double z) const;

    std::vector<double> z_;
    std::vector<State> x_;
    std::vector<State> dx_;
    std::vector<State> extra_;
};

enum class IvpStatus { Success, NoRealBranch, StepUnderflow, Guard };

std::string to_string(IvpStatus s);

struct BranchSwitch {
    double z;
    int from;
    int to;
};

struct IvpResult {
    DenseTrajectory trajectory;
    IvpStatus status = IvpStatus::Success;
    std::string message;
    double last_z = 0.0;  // last accepted abscissa
    std::vector<BranchSwitch> branch_log;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    bool ok() const noexcept { return status == IvpStatus::Success; }

    /// Rethrows a failed status as StepUnderflowError, NoRealBranchError or GuardError.
    void throw_if_failed() const;
};

struct IvpOptions {
    ToleranceSpec tol{};
    double initial_step = 0.0;  // 0 selects |z1 - z0| / 100
    double fixed_step = 0.0;    // > 0 disables error control
    std::size_t max_steps = 1'000'000;
};

using ExplicitRhs = std::function<void(double z, std::span<const double> x, std::span<double> dx)>;

/// Dormand-Prince 5(4) on x' = f(z, x) from z0 to z1 (either direction).
IvpResult solve_ivp(const ExplicitRhs& f, State x0, double z0, double z1, const IvpOptions& opt = {});

struct SlopeChoice {
    double slope;
    int branch = 0;  // resolver-defined label; changes are logged as branch switches
};

using ImplicitResidual = std::function<double(double z, std::span<const double> x, double slope)>;
using SlopeResolver =
    std::function<SlopeChoice(double z, std::span<const double> x, double previous_slope)>;
/// Derivatives of x[1..] given the resolved slope of x[0].
using AuxRhs =
    std::function<void(double z, std::span<const double> x, double slope, std::span<double> daux)>;

struct ImplicitSystem {
    ImplicitResidual residual;
    AuxRhs aux;              // may be empty for a scalar state
    SlopeResolver resolver;  // empty selects resolve_slope_bracketed on `residual`
};

/// Implicit mode. `initial_slope` must be (close to) a root of the residual at (z0, x0).
IvpResult solve_ivp(const ImplicitSystem& sys, State x0, double initial_slope, double z0, double z1,
                    const IvpOptions& opt = {});

/// Default stage resolver: bracket of width 4|previous|+1 centred on `previous`,
/// scanned for sign changes and widened geometrically up to 8 times.
/// @throws NoRealBranchError if no root is found.
SlopeChoice resolve_slope_bracketed(const ImplicitResidual& F, double z, std::span<const double> x,
                                    double previous, const ToleranceSpec& tol = {});

}  // namespace hedgesym
