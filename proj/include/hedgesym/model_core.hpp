#pragma once

/**
 * @file model_core.hpp
 * @brief Reaction function g(alpha), model parameters and the utility duality.
 *
 * The equilibrium price of the reaction-function model factorises as
 * psi(f, alpha) = f * g(alpha) with g positive and increasing. Writing the
 * ordinary investors' demand as U(f/s) ties g to a utility function through
 *
 *     U(1 / g(alpha)) = 1 - alpha.
 *
 * Three parametric families admit a richer symmetry group of the hedging PDE:
 *
 *     Exponential      g = c2 exp(c1 alpha)         U = ln(x)/c1 + (c1 + ln c2)/c1
 *     Power            g = c2 alpha^c1              U = 1 - (c2 x)^(-1/c1)
 *     FractionalPower  g = c2 (rho + k alpha)^(-1/c1)
 *                                                   U = (1 + rho/k) - (c2 x)^c1 / k
 *
 * A fourth, Tabulated, variant holds sampled data behind a shape-preserving
 * monotone cubic interpolant.
 */

#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace hedgesym {

struct Exponential {
    double c1;
    double c2;
};

struct Power {
    double c1;
    double c2;
};

struct FractionalPower {
    double c1;
    double c2;
    double k;
    double rho;
};

/// Sampled g(alpha) with monotone cubic (PCHIP) interpolation.
class Tabulated {
public:
    Tabulated(std::vector<double> alpha, std::vector<double> g);

    const std::vector<double>& alpha() const noexcept { return alpha_; }
    const std::vector<double>& g() const noexcept { return g_; }

    /// Empty when the samples are strictly increasing, positive and at least four.
    std::vector<std::string> violations() const;

    double value(double a) const;
    double derivative(double a) const;
    double alpha_min() const { return alpha_.front(); }
    double alpha_max() const { return alpha_.back(); }

private:
    struct Interp;
    std::vector<double> alpha_;
    std::vector<double> g_;
    std::shared_ptr<const Interp> interp_;
};

/// g(alpha) as one of the four families. Immutable.
class ReactionFunction {
public:
    using Family = std::variant<Exponential, Power, FractionalPower, Tabulated>;

    /// Checked construction; throws AdmissibilityError listing every violated constraint.
    explicit ReactionFunction(Family family);

    /// Construction that records, but does not reject, violations. Evaluating an
    /// inadmissible function still throws; this exists so callers can report them.
    static ReactionFunction unchecked(Family family);

    const Family& family() const noexcept { return family_; }
    bool admissible() const noexcept { return violations_.empty(); }
    const std::vector<std::string>& violations() const noexcept { return violations_; }

    /// Short family name: "exponential", "power", "fractional-power", "tabulated".
    std::string name() const;

    /// True if alpha lies in the declared domain.
    bool in_domain(double alpha) const;

private:
    ReactionFunction(Family family, bool checked);

    Family family_;
    std::vector<std::string> violations_;
};

/// Volatility of the fundamental value and the large trader's relative size.
struct ModelParams {
    double sigma;
    double rho;

    ModelParams(double sigma_, double rho_);
};

double eval_g(const ReactionFunction& g, double alpha);

/// g'(alpha) / g(alpha)
double log_derivative_g(const ReactionFunction& g, double alpha);

std::vector<std::string> check_admissibility(const ReactionFunction::Family& family);
std::vector<std::string> check_admissibility(const ReactionFunction& g);

/// Utility function dual to a reaction function, U(1/g(alpha)) = 1 - alpha.
class UtilitySpec {
public:
    explicit UtilitySpec(ReactionFunction g);

    const ReactionFunction& reaction() const noexcept { return g_; }

    /// Closed form as text, e.g. "U(x) = -(c2*x)^(-1/c1) + 1".
    std::string formula() const;

    /// Interval of x on which U is defined (open upper end for closed forms is +inf).
    double x_min() const;
    double x_max() const;

private:
    ReactionFunction g_;
};

double utility_value(const UtilitySpec& u, double x);

/// `n` alpha values evenly spread over a bounded part of the domain of g:
/// [-2, 2] (exponential), [0.05, 2] (power), rho + k alpha in [0.05, 2 max(1, rho)]
/// (fractional power), the sampled range (tabulated).
std::vector<double> duality_samples(const ReactionFunction& g, std::size_t n);

/// |U(1/g(alpha)) - (1 - alpha)|
double duality_error(const UtilitySpec& u, double alpha);

/// Reads a two-column CSV with header `alpha,g`.
Tabulated load_tabulated_csv(const std::filesystem::path& path);

}  // namespace hedgesym
