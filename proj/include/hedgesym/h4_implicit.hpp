#pragma once

/**
 * @file h4_implicit.hpp
 * @brief Implicit solution z(Y) of the S_H4 reduction, its inversion, and the
 * Euler-substitution identities of the S_H3 and S_H4 integrals.
 *
 * With A = eta - gamma Y, m = beta^2 gamma + kappa and
 * R = kappa Y ((4(beta-1)gamma + kappa) Y - 4(beta-1) eta) = theta Y (Y - zeta),
 * the branch of the S_H4 reduced ODE traced by the implicit solution is
 *
 *     dz/dY = 2A / (Y (2 beta A - kappa Y - sqrt(R)))
 *
 * and an antiderivative is
 *
 *     2 beta m z + d1 = 2 m ln Y
 *                      - beta sqrt(theta) ln(theta Y - a1/2 + sqrt(theta Y (theta Y - a1)))
 *                      + (beta - 2) kappa ln|Y (2 beta^2 (beta-1) gamma + kappa ((beta-1)^2 + 1))
 *                                            - 2 beta^2 (beta-1) eta + beta (beta-2) sqrt(R)|
 *
 * The closed form is checked against the integrand when an H4Implicit is
 * built; if the check fails, z(Y) is computed by quadrature instead.
 */

#include "hedgesym/reductions.hpp"
#include "hedgesym/surface.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace hedgesym {

struct H4Constants {
    double beta, gamma, kappa, eta, theta, zeta, a1;

    /// @throws ParamError if a field is missing or theta <= 0.
    static H4Constants from(const DerivedParams& d);

    double m() const { return beta * beta * gamma + kappa; }
    /// Constant solution Y* = beta^2 eta / m of the reduced ODE.
    double y_star() const { return beta * beta * eta / m(); }
};

/// R(Y) = theta Y (Y - zeta).
double h4_radicand(const H4Constants& c, double Y);

/// dz/dY on the traced branch. @throws DomainError for Y <= 0 or R < 0.
double h4_integrand(const H4Constants& c, double Y);

/// The integrand as printed next to the integral form, 2A / sqrt(R). It is not
/// dz/dY of the reduced ODE; kept for comparison.
double h4_integrand_printed(const H4Constants& c, double Y);

/// Right-hand side of the antiderivative above (d1 = 0).
/// @throws DomainError outside the real region.
double h4_antiderivative(const H4Constants& c, double Y);

/// Same with the Y-coefficient of the last logarithm as printed,
/// beta^2 (kappa + 2 gamma (beta - 1)); kept for comparison.
double h4_antiderivative_printed(const H4Constants& c, double Y);

enum class H4Mode { ClosedForm, Quadrature };

std::string to_string(H4Mode m);

class H4Implicit {
public:
    /// `force_quadrature` skips the closed form. For eta < 0 the closed form
    /// is not used; z(Y) is then z(Y_a) + integral of dz/dY with
    /// Y_a = lower segment end + 1 and z(Y_a) = -d1 / (2 beta m).
    explicit H4Implicit(const H4Constants& c, double d1 = 0.0, bool force_quadrature = false);

    const H4Constants& constants() const noexcept { return c_; }
    H4Mode mode() const noexcept { return mode_; }
    double d1() const noexcept { return d1_; }
    /// Largest relative mismatch found while validating the closed form.
    double validation_error() const noexcept { return validation_error_; }

    /// z(Y). @throws DomainError where the branch is not real.
    double z(double Y) const;
    double dz_dY(double Y) const { return h4_integrand(c_, Y); }

    /// Positive critical points: zeta (branch point), Y* (log pole), eta/gamma (dz/dY = 0).
    std::vector<double> critical_points() const;

    /// (Y_lo, +inf): z(Y) is strictly monotone above the largest positive critical point.
    double segment_lower() const noexcept { return y_lo_; }
    /// z(Y_lo) (finite when Y_lo is the dz/dY = 0 point or the branch point).
    double z_lower() const;

    /// Y with z(Y) = target on the monotone segment.
    /// @throws BracketError if the target is outside z(segment).
    double invert(double target) const;

private:
    double z_closed(double Y) const;
    double z_quadrature(double Y) const;

    H4Constants c_;
    double d1_;
    H4Mode mode_ = H4Mode::ClosedForm;
    double validation_error_ = 0.0;
    double y_lo_ = 0.0;
    double y_anchor_ = 1.0;
    double z_anchor_ = 0.0;
};

/// z = (RHS(Y) - d1) / (2 beta m) for an S_H4 case.
double implicit_solution_h4(const DerivedParams& d, double Y, double d1 = 0.0);

/// `n` points (z, Y) of the curve, uniform in z over [z_lo, min(z_hi, z(y_hi))].
std::vector<std::array<double, 2>> h4_curve(const H4Implicit& h, double z_lo, double z_hi, double y_hi,
                                            std::size_t n);

/// u(S, t) = W(ln S - gamma t) + eta t on `grid`, with W(z_ref) = w0 and
/// W' = Y(z) from the inversion. z_ref defaults to the smallest z on the grid.
/// @throws BracketError when a grid point leaves the monotone segment.
GridSurface invert_and_reconstruct(const H4Implicit& h, const SampleGrid& grid, double w0 = 0.0);

/// W(z) - W(z_ref) = integral of Y dz, computed as the integral of Y dz/dY dY.
double h4_w_increment(const H4Implicit& h, double y_ref, double y);

/// Euler substitution Y = theta zeta / (theta - tau^2) of the S_H4 integral.
/// `printed_constants` selects b2 = 2 beta/(theta zeta), b0 = kappa + 2 beta gamma - 2 beta/zeta;
/// otherwise b2 = 2 beta eta/(theta zeta), b0 = kappa + 2 beta gamma - 2 beta eta/zeta.
double h4_euler_rational(const H4Constants& c, double tau, int sign, bool printed_constants = false);

/// The substituted integrand (dz/dY)(Y(tau)) dY/dtau for the branch matching
/// the rational form with `sign`.
double h4_euler_substituted(const H4Constants& c, double tau, int sign);

/// Largest |substituted - rational| / max(1, |rational|) over the samples.
/// @throws DomainError at tau^2 = theta, ParamError for zeta = 0.
double euler_substitution_check(const H4Constants& c, std::span<const double> taus, int sign,
                                bool printed_constants = false);

/// S_H3 counterpart: the integrand -2A / (Y (B +- sqrt(theta Y (Y - zeta)))) with
/// A = delta - gamma Y, B = 2A (Y - beta) + kappa Y, after the same substitution, against
/// -4 tau (delta D - gamma theta zeta) / (2 (delta D - gamma theta zeta)(theta zeta - beta D)
///                                       + kappa theta zeta D +- theta zeta tau D),
/// D = theta - tau^2.
double euler_substitution_check_h3(const DerivedParams& d, std::span<const double> taus, int sign);

/// 100 tau samples spread over (-0.98, 0.98) sqrt(theta), excluding 0.
std::vector<double> default_tau_samples(double theta, std::size_t n = 100);

}  // namespace hedgesym
