#include "hedgesym/model_core.hpp"

#include "hedgesym/errors.hpp"
#include "hedgesym/io.hpp"
#include "hedgesym/numerics.hpp"

#include <math.h>  // boost 1.74 pchip calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace hedgesym {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

struct Tabulated::Interp {
    boost::math::interpolators::pchip<std::vector<double>> spline;
};

Tabulated::Tabulated(std::vector<double> alpha, std::vector<double> g)
    : alpha_(std::move(alpha)), g_(std::move(g)) {
    if (alpha_.size() != g_.size()) throw ParamError("tabulated g: alpha and g differ in length");
    if (violations().empty()) {
        auto a = alpha_;
        auto v = g_;
        interp_ = std::make_shared<const Interp>(Interp{{std::move(a), std::move(v)}});
    }
}

std::vector<std::string> Tabulated::violations() const {
    std::vector<std::string> out;
    if (alpha_.size() < 4) out.emplace_back("at least 4 samples required");
    for (std::size_t i = 1; i < alpha_.size(); ++i) {
        if (!(alpha_[i] > alpha_[i - 1])) {
            out.emplace_back("alpha strictly increasing required");
            break;
        }
    }
    for (std::size_t i = 1; i < g_.size(); ++i) {
        if (!(g_[i] > g_[i - 1])) {
            out.emplace_back("g strictly increasing required");
            break;
        }
    }
    for (double v : g_) {
        if (!(v > 0.0)) {
            out.emplace_back("g > 0 required");
            break;
        }
    }
    return out;
}

double Tabulated::value(double a) const {
    if (!interp_) throw AdmissibilityError("tabulated g is not admissible", violations());
    if (!(a >= alpha_min() && a <= alpha_max())) throw DomainError("alpha outside the tabulated range");
    return interp_->spline(a);
}

double Tabulated::derivative(double a) const {
    if (!interp_) throw AdmissibilityError("tabulated g is not admissible", violations());
    if (!(a >= alpha_min() && a <= alpha_max())) throw DomainError("alpha outside the tabulated range");
    return interp_->spline.prime(a);
}

std::vector<std::string> check_admissibility(const ReactionFunction::Family& family) {
    return std::visit(
        overloaded{
            [](const Exponential& f) {
                std::vector<std::string> v;
                if (!(f.c1 > 0.0)) v.emplace_back("c1 > 0 required");
                if (!(f.c2 > 0.0)) v.emplace_back("c2 > 0 required");
                return v;
            },
            [](const Power& f) {
                std::vector<std::string> v;
                if (!(f.c1 > 0.0)) v.emplace_back("c1 > 0 required");
                if (!(f.c2 > 0.0)) v.emplace_back("c2 > 0 required");
                return v;
            },
            [](const FractionalPower& f) {
                std::vector<std::string> v;
                if (!(f.c2 > 0.0)) v.emplace_back("c2 > 0 required");
                if (!(f.c1 < 0.0 || (f.c1 > 0.0 && f.c1 < 1.0))) {
                    v.emplace_back("c1 in (-inf,0) U (0,1) required");
                }
                if (!(f.k * f.c1 > 0.0)) v.emplace_back("k·c1 > 0 required");
                if (!(f.rho >= 0.0)) v.emplace_back("rho >= 0 required");
                return v;
            },
            [](const Tabulated& t) { return t.violations(); },
        },
        family);
}

std::vector<std::string> check_admissibility(const ReactionFunction& g) { return g.violations(); }

ReactionFunction::ReactionFunction(Family family, bool checked)
    : family_(std::move(family)), violations_(check_admissibility(family_)) {
    if (checked && !violations_.empty()) {
        std::string msg = "inadmissible " + name() + " parameters:";
        for (const auto& v : violations_) msg += " " + v + ";";
        throw AdmissibilityError(msg, violations_);
    }
}

ReactionFunction::ReactionFunction(Family family) : ReactionFunction(std::move(family), true) {}

ReactionFunction ReactionFunction::unchecked(Family family) { return ReactionFunction(std::move(family), false); }

std::string ReactionFunction::name() const {
    return std::visit(overloaded{
                          [](const Exponential&) { return std::string("exponential"); },
                          [](const Power&) { return std::string("power"); },
                          [](const FractionalPower&) { return std::string("fractional-power"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                      },
                      family_);
}

bool ReactionFunction::in_domain(double alpha) const {
    if (!std::isfinite(alpha)) return false;
    return std::visit(overloaded{
                          [](const Exponential&) { return true; },
                          [&](const Power&) { return alpha > 0.0; },
                          [&](const FractionalPower& f) { return f.rho + f.k * alpha > 0.0; },
                          [&](const Tabulated& t) { return alpha >= t.alpha_min() && alpha <= t.alpha_max(); },
                      },
                      family_);
}

ModelParams::ModelParams(double sigma_, double rho_) : sigma(sigma_), rho(rho_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParamError("sigma > 0 required");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ParamError("rho >= 0 required");
}

namespace {

void require_evaluable(const ReactionFunction& g, double alpha) {
    if (!g.admissible()) {
        std::string msg = "cannot evaluate inadmissible " + g.name() + " g:";
        for (const auto& v : g.violations()) msg += " " + v + ";";
        throw AdmissibilityError(msg, g.violations());
    }
    if (!g.in_domain(alpha)) {
        throw DomainError("alpha = " + num(alpha) + " outside the domain of the " + g.name() + " g");
    }
}

}  // namespace

double eval_g(const ReactionFunction& g, double alpha) {
    require_evaluable(g, alpha);
    return std::visit(overloaded{
                          [&](const Exponential& f) { return f.c2 * std::exp(f.c1 * alpha); },
                          [&](const Power& f) { return f.c2 * std::pow(alpha, f.c1); },
                          [&](const FractionalPower& f) {
                              return f.c2 * std::pow(f.rho + f.k * alpha, -1.0 / f.c1);
                          },
                          [&](const Tabulated& t) { return t.value(alpha); },
                      },
                      g.family());
}

double log_derivative_g(const ReactionFunction& g, double alpha) {
    require_evaluable(g, alpha);
    return std::visit(overloaded{
                          [&](const Exponential& f) { return f.c1; },
                          [&](const Power& f) { return f.c1 / alpha; },
                          [&](const FractionalPower& f) { return -f.k / (f.c1 * (f.rho + f.k * alpha)); },
                          [&](const Tabulated& t) { return t.derivative(alpha) / t.value(alpha); },
                      },
                      g.family());
}

UtilitySpec::UtilitySpec(ReactionFunction g) : g_(std::move(g)) {
    if (!g_.admissible()) {
        throw AdmissibilityError("utility of an inadmissible " + g_.name() + " g", g_.violations());
    }
}

std::string UtilitySpec::formula() const {
    return std::visit(
        overloaded{
            [](const Exponential& f) {
                return "U(x) = ln(x)/" + num(f.c1) + " + (" + num(f.c1) + " + ln(" + num(f.c2) + "))/" +
                       num(f.c1);
            },
            [](const Power& f) { return "U(x) = -(" + num(f.c2) + "*x)^(-1/" + num(f.c1) + ") + 1"; },
            [](const FractionalPower& f) {
                return "U(x) = -(1/" + num(f.k) + ")*(" + num(f.c2) + "*x)^" + num(f.c1) + " + (1 + " +
                       num(f.rho) + "/" + num(f.k) + ")";
            },
            [](const Tabulated&) { return std::string("U(x) = 1 - g^{-1}(1/x) (tabulated)"); },
        },
        g_.family());
}

double UtilitySpec::x_min() const {
    if (const auto* t = std::get_if<Tabulated>(&g_.family())) return 1.0 / t->g().back();
    return 0.0;
}

double UtilitySpec::x_max() const {
    if (const auto* t = std::get_if<Tabulated>(&g_.family())) return 1.0 / t->g().front();
    return std::numeric_limits<double>::infinity();
}

double utility_value(const UtilitySpec& u, double x) {
    if (!(x > 0.0)) throw DomainError("utility argument must be positive, got " + num(x));
    return std::visit(
        overloaded{
            [&](const Exponential& f) { return (std::log(x) + f.c1 + std::log(f.c2)) / f.c1; },
            [&](const Power& f) { return 1.0 - std::pow(f.c2 * x, -1.0 / f.c1); },
            [&](const FractionalPower& f) { return (1.0 + f.rho / f.k) - std::pow(f.c2 * x, f.c1) / f.k; },
            [&](const Tabulated& t) {
                if (x < u.x_min() || x > u.x_max()) {
                    throw DomainError("utility argument outside the tabulated range");
                }
                const double target = 1.0 / x;
                const double a = find_root_bracketed([&](double al) { return t.value(al) - target; },
                                                     t.alpha_min(), t.alpha_max(),
                                                     ToleranceSpec{1e-15, 1e-15, 400, 50});
                return 1.0 - a;
            },
        },
        u.reaction().family());
}

std::vector<double> duality_samples(const ReactionFunction& g, std::size_t n) {
    if (n < 2) throw ParamError("at least 2 samples required");
    const auto [lo, hi] = std::visit(overloaded{
                                         [](const Exponential&) { return std::pair{-2.0, 2.0}; },
                                         [](const Power&) { return std::pair{0.05, 2.0}; },
                                         [](const FractionalPower& f) {
                                             const double a = (0.05 - f.rho) / f.k;
                                             const double b = (2.0 * std::max(1.0, f.rho) - f.rho) / f.k;
                                             return std::pair{std::min(a, b), std::max(a, b)};
                                         },
                                         [](const Tabulated& t) { return std::pair{t.alpha_min(), t.alpha_max()}; },
                                     },
                                     g.family());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

double duality_error(const UtilitySpec& u, double alpha) {
    return std::abs(utility_value(u, 1.0 / eval_g(u.reaction(), alpha)) - (1.0 - alpha));
}

Tabulated load_tabulated_csv(const std::filesystem::path& path) {
    static const std::vector<std::string> header{"alpha", "g"};
    const auto rows = io::read_csv(path, header);
    std::vector<double> a, g;
    a.reserve(rows.size());
    g.reserve(rows.size());
    for (const auto& r : rows) {
        a.push_back(r[0]);
        g.push_back(r[1]);
    }
    return Tabulated(std::move(a), std::move(g));
}

}  // namespace hedgesym
