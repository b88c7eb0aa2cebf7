#include "hedgesym/reductions.hpp"

#include "hedgesym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hedgesym {

std::string to_string(CaseId c) {
    switch (c) {
        case CaseId::G_H2: return "g_h2";
        case CaseId::G_H3: return "g_h3";
        case CaseId::S_H2: return "s_h2";
        case CaseId::S_H3: return "s_h3";
        case CaseId::S_H4: return "s_h4";
    }
    return "unknown";
}

CaseId parse_case(const std::string& s) {
    std::string l;
    for (char ch : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (CaseId c : {CaseId::G_H2, CaseId::G_H3, CaseId::S_H2, CaseId::S_H3, CaseId::S_H4}) {
        if (to_string(c) == l) return c;
    }
    throw ParamError("unknown case '" + s + "' (expected g_h2, g_h3, s_h2, s_h3 or s_h4)");
}

bool is_general_case(CaseId c) { return c == CaseId::G_H2 || c == CaseId::G_H3; }

std::string to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

Branch parse_branch(const std::string& s) {
    if (s == "plus" || s == "+") return Branch::Plus;
    if (s == "minus" || s == "-") return Branch::Minus;
    throw ParamError("unknown branch '" + s + "' (expected plus or minus)");
}

std::string to_string(SolutionFamily f) {
    switch (f) {
        case SolutionFamily::PowerOption: return "power-option";
        case SolutionFamily::ExcludedH2: return "excluded-h2";
        case SolutionFamily::ExcludedH3: return "excluded-h3";
        case SolutionFamily::ExcludedH4: return "excluded-h4";
        case SolutionFamily::NumericalInvariant: return "numerical-invariant";
    }
    return "unknown";
}

namespace {

bool uses_phi(CaseId c) { return c != CaseId::G_H2; }

void check_phi(double phi) {
    if (!std::isfinite(phi)) throw ParamError("phi must be finite");
    if (std::abs(std::sin(phi)) < 1e-12 || std::abs(std::cos(phi)) < 1e-12) {
        throw TrivialCaseError("sin(phi) = 0 or cos(phi) = 0 leads to trivial invariants");
    }
}

}  // namespace

void ReductionCase::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParamError("sigma > 0 required");
    if (uses_phi(id)) check_phi(phi);
    if ((id == CaseId::G_H2 || id == CaseId::S_H4) && eps != 1 && eps != -1) {
        throw ParamError("eps must be +1 or -1");
    }
    if (is_general_case(id)) {
        if (!g) throw ParamError("case " + to_string(id) + " needs a reaction function g");
        if (!g->admissible()) throw AdmissibilityError("inadmissible g", g->violations());
        if (!(rho >= 0.0) || !std::isfinite(rho)) throw ParamError("rho >= 0 required");
    } else {
        if (c1 == 0.0 || !std::isfinite(c1)) throw ParamError("c1 must be nonzero");
    }
    if (id == CaseId::S_H3 && (x == 0.0 || !std::isfinite(x))) throw ParamError("x must be nonzero");
}

SpecialParams ReductionCase::haupt() const {
    if (is_general_case(id)) throw ParamError("case " + to_string(id) + " belongs to the general model");
    return SpecialParams{SpecialModel::Haupt, sigma, c1};
}

ModelParams ReductionCase::model() const {
    if (!is_general_case(id)) throw ParamError("case " + to_string(id) + " belongs to the haupt model");
    return ModelParams(sigma, rho);
}

double DerivedParams::need(const std::optional<double>& v, const char* name) {
    if (!v) throw ParamError(std::string("derived parameter ") + name + " is not defined for this case");
    return *v;
}

nlohmann::json DerivedParams::to_json() const {
    auto put = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"gamma", put(gamma)}, {"beta", put(beta)}, {"kappa", put(kappa)}, {"delta", put(delta)},
            {"eta", put(eta)},     {"theta", put(theta)}, {"zeta", put(zeta)}, {"a1", put(a1)}};
}

DerivedParams derived_params(const ReductionCase& rc) {
    rc.validate();
    DerivedParams d;
    if (uses_phi(rc.id)) d.gamma = std::cos(rc.phi) / std::sin(rc.phi);
    if (is_general_case(rc.id)) return d;

    const double s2 = rc.sigma * rc.sigma;
    const double beta = (rc.c1 + 1.0) / rc.c1;
    d.beta = beta;
    const double gamma = *d.gamma;
    if (rc.id == CaseId::S_H2) {
        d.kappa = s2 / (2.0 * gamma * rc.c1 * rc.c1);
        return d;
    }
    const double kappa = s2 / (2.0 * rc.c1 * rc.c1);
    d.kappa = kappa;
    const double m = 4.0 * (beta - 1.0) * gamma + kappa;
    d.theta = kappa * m;
    if (rc.id == CaseId::S_H3) {
        d.delta = 1.0 / (rc.x * std::sin(rc.phi));
        if (m == 0.0) throw ParamError("4(beta-1)gamma + kappa = 0: zeta undefined");
        d.zeta = 4.0 * (beta - 1.0) * *d.delta / m;
        return d;
    }
    d.eta = static_cast<double>(rc.eps) / std::sin(rc.phi);
    if (m == 0.0) throw ParamError("4(beta-1)gamma + kappa = 0: zeta undefined");
    d.zeta = 4.0 * (beta - 1.0) * *d.eta / m;
    d.a1 = 4.0 * kappa * (beta - 1.0) * *d.eta;
    return d;
}

Chart::Chart(const ReductionCase& rc) : id_(rc.id) {
    const DerivedParams d = derived_params(rc);
    if (d.gamma) gamma_ = *d.gamma;
    if (d.delta) delta_ = *d.delta;
    if (d.eta) eta_ = *d.eta;
    eps_ = static_cast<double>(rc.eps);
}

double Chart::z(double S, double t) const {
    if (!(S > 0.0)) throw DomainError("S must be positive");
    if (id_ == CaseId::G_H2) return S;
    return std::log(S) - gamma_ * t;
}

double Chart::W(double S, double t, double u) const {
    if (!(S > 0.0)) throw DomainError("S must be positive");
    switch (id_) {
        case CaseId::G_H2: return u - eps_ * t;
        case CaseId::G_H3: return u / S;
        case CaseId::S_H2: return u;
        case CaseId::S_H3:
            if (!(u > 0.0)) throw DomainError("the S_H3 chart needs u > 0");
            return std::log(u) - delta_ * t;
        case CaseId::S_H4: return u - eta_ * t;
    }
    throw ParamError("unknown case");
}

double Chart::u(double S, double t, double W) const {
    if (!(S > 0.0)) throw DomainError("S must be positive");
    switch (id_) {
        case CaseId::G_H2: return W + eps_ * t;
        case CaseId::G_H3: return S * W;
        case CaseId::S_H2: return W;
        case CaseId::S_H3: return std::exp(W + delta_ * t);
        case CaseId::S_H4: return W + eta_ * t;
    }
    throw ParamError("unknown case");
}

Jet Chart::jet(double S, double t, double W, double Y, double Yp) const {
    if (!(S > 0.0)) throw DomainError("S must be positive");
    switch (id_) {
        case CaseId::G_H2: return {W + eps_ * t, eps_, Y, Yp};
        case CaseId::G_H3: return {S * W, -gamma_ * S * Y, W + Y, (Y + Yp) / S};
        case CaseId::S_H2: return {W, -gamma_ * Y, Y / S, (Yp - Y) / (S * S)};
        case CaseId::S_H3: {
            const double u = std::exp(W + delta_ * t);
            return {u, u * (delta_ - gamma_ * Y), u * Y / S, u * (Yp + Y * Y - Y) / (S * S)};
        }
        case CaseId::S_H4: return {W + eta_ * t, eta_ - gamma_ * Y, Y / S, (Yp - Y) / (S * S)};
    }
    throw ParamError("unknown case");
}

nlohmann::json Chart::to_json() const {
    switch (id_) {
        case CaseId::G_H2: return {{"z", "S"}, {"W", "u - eps*t"}, {"eps", eps_}};
        case CaseId::G_H3: return {{"z", "ln(S) - gamma*t"}, {"W", "u/S"}, {"gamma", gamma_}};
        case CaseId::S_H2: return {{"z", "ln(S) - gamma*t"}, {"W", "u"}, {"gamma", gamma_}};
        case CaseId::S_H3:
            return {{"z", "ln(S) - gamma*t"}, {"W", "ln(u) - delta*t"}, {"gamma", gamma_}, {"delta", delta_}};
        case CaseId::S_H4:
            return {{"z", "ln(S) - gamma*t"}, {"W", "u - eta*t"}, {"gamma", gamma_}, {"eta", eta_}};
    }
    return {};
}

InvariantPoint invariant_coords(const ReductionCase& rc, double S, double t, double u) {
    const Chart c(rc);
    return {c.z(S, t), c.W(S, t, u)};
}

namespace {

/// Roots of a x^2 + b x + c with known discriminant, labelled by the sign in
/// (-b +- sqrt(disc)) / (2a). Returns {plus, minus}; an infinite root is NaN.
std::array<double, 2> labelled_roots(double a, double b, double c, double disc) {
    const double sq = std::sqrt(disc);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (a == 0.0) {
        if (b == 0.0) return {nan, nan};
        // The finite root is c/q of the stable form below.
        const double lin = -c / b;
        return b > 0.0 ? std::array<double, 2>{lin, nan} : std::array<double, 2>{nan, lin};
    }
    if (b > 0.0) {
        const double q = -0.5 * (b + sq);
        const double minus = q / a;
        const double plus = q != 0.0 ? c / q : (-b + sq) / (2.0 * a);
        return {plus, minus};
    }
    const double q = 0.5 * (-b + sq);
    const double plus = q / a;
    const double minus = q != 0.0 ? c / q : (-b - sq) / (2.0 * a);
    return {plus, minus};
}

}  // namespace

std::array<double, 2> power_roots(double beta, double kappa) {
    const double disc = kappa * (kappa + 4.0 * (beta - 1.0));
    if (disc < 0.0) {
        throw ComplexRootsError("power_roots: negative discriminant " + std::to_string(disc), disc);
    }
    auto r = labelled_roots(1.0, -(2.0 * beta + kappa), beta * beta + kappa, disc);
    if (r[0] > r[1]) std::swap(r[0], r[1]);
    return {r[0], r[1]};
}

ClosedForm power_option_surface(double gamma, double k, double d1, double d2) {
    PowerExpSeries s;
    s.terms.push_back({d1, k, -gamma * k});
    s.constant = d2;
    return ClosedForm("power option k=" + std::to_string(k), s);
}

ClosedFormSolution build_power_option(const ReductionCase& rc, Branch branch, double d1, double d2) {
    if (rc.id != CaseId::S_H2) throw ParamError("power options belong to case s_h2");
    const DerivedParams d = derived_params(rc);
    const auto k = power_roots(*d.beta, *d.kappa);
    const double kk = branch == Branch::Plus ? k[1] : k[0];
    return {SolutionFamily::PowerOption, rc, d1, d2, kk, power_option_surface(*d.gamma, kk, d1, d2)};
}

ClosedFormSolution excluded_family(const ReductionCase& rc, double d1, double d2) {
    const DerivedParams d = derived_params(rc);
    PowerExpSeries s;
    SolutionFamily fam;
    switch (rc.id) {
        case CaseId::S_H2:
            fam = SolutionFamily::ExcludedH2;
            s.terms.push_back({d1, *d.beta, -*d.gamma * *d.beta});
            s.constant = d2;
            break;
        case CaseId::S_H3:
            fam = SolutionFamily::ExcludedH3;
            s.terms.push_back({d1, *d.beta, *d.delta - *d.beta * *d.gamma});
            s.terms.push_back({d2, 0.0, *d.delta});
            break;
        case CaseId::S_H4:
            fam = SolutionFamily::ExcludedH4;
            s.terms.push_back({d1, *d.beta, -*d.beta * *d.gamma});
            s.t_linear = *d.eta * d2;
            break;
        default: throw ParamError("excluded families are defined for the s_h2, s_h3 and s_h4 cases");
    }
    return {fam, rc, d1, d2, std::nullopt, ClosedForm("excluded " + to_string(rc.id), s)};
}

// ---------------------------------------------------------------------------
// Reduced ODEs
// ---------------------------------------------------------------------------

ReducedOde::ReducedOde(const ReductionCase& rc) : rc_(rc), dp_(derived_params(rc)) {}

namespace {

/// rho * g'(rho a) / g(rho a), 0 for rho = 0.
double feedback(const ReductionCase& rc, double a) {
    if (rc.rho == 0.0) return 0.0;
    return rc.rho * log_derivative_g(*rc.g, rc.rho * a);
}

}  // namespace

std::array<double, 3> ReducedOde::coefficients(double Y) const {
    const double beta = *dp_.beta, kappa = *dp_.kappa;
    switch (rc_.id) {
        case CaseId::S_H2: return {1.0, -Y * (2.0 * beta + kappa), Y * Y * (beta * beta + kappa)};
        case CaseId::S_H3: {
            const double A = *dp_.delta - *dp_.gamma * Y;
            return {A, Y * (2.0 * A * (Y - beta) + kappa * Y),
                    Y * Y * (A * (Y - beta) * (Y - beta) + kappa * Y * (Y - 1.0))};
        }
        case CaseId::S_H4: {
            const double gamma = *dp_.gamma, eta = *dp_.eta;
            return {eta - gamma * Y, Y * (Y * (2.0 * beta * gamma + kappa) - 2.0 * beta * eta),
                    -Y * Y * (Y * (beta * beta * gamma + kappa) - beta * beta * eta)};
        }
        default: throw ParamError("case " + to_string(rc_.id) + " is not quadratic in Y'");
    }
}

double ReducedOde::discriminant(double Y) const {
    const double beta = *dp_.beta, kappa = *dp_.kappa;
    switch (rc_.id) {
        case CaseId::S_H2: return Y * Y * kappa * (kappa + 4.0 * (beta - 1.0));
        case CaseId::S_H3: return Y * Y * Y * *dp_.theta * (Y - *dp_.zeta);
        case CaseId::S_H4: return Y * Y * (*dp_.theta * Y * (Y - *dp_.zeta));
        default: throw ParamError("case " + to_string(rc_.id) + " is not quadratic in Y'");
    }
}

double ReducedOde::residual(double z, std::span<const double> x, double slope) const {
    const double Y = x[0];
    switch (rc_.id) {
        case CaseId::G_H2: {
            const double D = 1.0 - feedback(rc_, Y) * z * slope;
            return 2.0 * rc_.eps * D * D + rc_.sigma * rc_.sigma * z * z * slope;
        }
        case CaseId::G_H3: {
            const double V = Y + slope;
            const double D = 1.0 - feedback(rc_, x[1] + Y) * V;
            return 2.0 * *dp_.gamma * Y * D * D - rc_.sigma * rc_.sigma * V;
        }
        default: {
            const auto [a, b, c] = coefficients(Y);
            return (a * slope + b) * slope + c;
        }
    }
}

double ReducedOde::guard_margin(double z, std::span<const double> x, double slope) const {
    const double Y = x[0];
    switch (rc_.id) {
        case CaseId::G_H2: return 1.0 - feedback(rc_, Y) * z * slope;
        case CaseId::G_H3: return 1.0 - feedback(rc_, x[1] + Y) * (Y + slope);
        case CaseId::S_H3: return slope + Y * Y - *dp_.beta * Y;
        default: return slope - *dp_.beta * Y;
    }
}

void ReducedOde::check_guard(double z, std::span<const double> x, double slope) const {
    const double m = guard_margin(z, x, slope);
    double scale = 1.0;
    switch (rc_.id) {
        case CaseId::G_H2: scale += std::abs(rc_.sigma * rc_.sigma * z * z * slope); break;
        case CaseId::G_H3: scale += std::abs(rc_.sigma * rc_.sigma * (x[0] + slope)); break;
        default: scale += std::abs(x[0]) + std::abs(slope); break;
    }
    if (std::abs(m) < kGuardTolerance * scale) {
        throw GuardError("reduced denominator vanishes at z = " + std::to_string(z), 1, 1);
    }
}

std::vector<double> ReducedOde::real_slopes(double z, std::span<const double> x) const {
    if (quadratic()) {
        const double disc = discriminant(x[0]);
        if (disc < 0.0) throw NoRealBranchError("negative discriminant at z = " + std::to_string(z), z);
        const auto [a, b, c] = coefficients(x[0]);
        const auto r = labelled_roots(a, b, c, disc);
        if (std::isnan(r[0]) && std::isnan(r[1])) throw NoRealBranchError("degenerate reduced ODE", z);
        return {r[0], r[1]};
    }

    auto F = [&](double s) {
        try {
            const double v = residual(z, x, s);
            return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
        } catch (const DomainError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::vector<double> pts;
    constexpr int kPerDecade = 40;
    for (int k = 8 * kPerDecade; k >= -10 * kPerDecade; --k) pts.push_back(-std::pow(10.0, k / double(kPerDecade)));
    pts.push_back(0.0);
    for (int k = -10 * kPerDecade; k <= 8 * kPerDecade; ++k) pts.push_back(std::pow(10.0, k / double(kPerDecade)));

    const ToleranceSpec tol{1e-15, 1e-14, 200, 50};
    std::vector<double> roots;
    double fa = F(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double fb = F(pts[i]);
        if (!std::isnan(fa) && !std::isnan(fb)) {
            if (fa == 0.0) {
                roots.push_back(pts[i - 1]);
            } else if ((fa < 0.0) != (fb < 0.0)) {
                roots.push_back(find_root_bracketed(F, pts[i - 1], pts[i], tol));
            }
        }
        fa = fb;
    }
    if (roots.empty()) throw NoRealBranchError("no real slope at z = " + std::to_string(z), z);
    return roots;
}

double ReducedOde::branch_slope(double z, std::span<const double> x, Branch b) const {
    const auto r = real_slopes(z, x);
    if (quadratic()) {
        const double v = b == Branch::Plus ? r[0] : r[1];
        if (std::isnan(v)) throw NoRealBranchError("branch " + to_string(b) + " is not finite here", z);
        return v;
    }
    return b == Branch::Plus ? r.back() : r.front();
}

SlopeChoice ReducedOde::resolve(double z, std::span<const double> x, double previous) const {
    SlopeChoice choice{0.0, 0};
    if (quadratic()) {
        const auto r = real_slopes(z, x);
        const bool plus_ok = !std::isnan(r[0]);
        const bool minus_ok = !std::isnan(r[1]);
        if (plus_ok && (!minus_ok || std::abs(r[0] - previous) <= std::abs(r[1] - previous))) {
            choice = {r[0], 0};
        } else {
            choice = {r[1], 1};
        }
    } else {
        const ToleranceSpec tol{1e-15, 1e-14, 200, 50};
        choice = resolve_slope_bracketed([this](double zz, std::span<const double> xx,
                                                double s) { return residual(zz, xx, s); },
                                         z, x, previous, tol);
    }
    check_guard(z, x, choice.slope);
    return choice;
}

ImplicitSystem ReducedOde::system() const {
    ImplicitSystem sys;
    sys.residual = [this](double z, std::span<const double> x, double s) { return residual(z, x, s); };
    sys.resolver = [this](double z, std::span<const double> x, double prev) { return resolve(z, x, prev); };
    if (rc_.id == CaseId::G_H3) {
        sys.aux = [](double, std::span<const double> x, double, std::span<double> daux) { daux[0] = x[0]; };
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

Trajectory::Trajectory(ReductionCase rc, IvpResult ivp, double w0)
    : rc_(std::move(rc)), ode_(rc_), ivp_(std::move(ivp)), w0_(w0) {
    const auto& tr = ivp_.trajectory;
    w_nodes_.resize(tr.size());
    if (tr.empty()) return;
    w_nodes_[0] = w0_;
    if (rc_.id == CaseId::G_H3) {
        for (std::size_t i = 0; i < tr.size(); ++i) w_nodes_[i] = tr.node_state(i)[1];
        return;
    }
    const ToleranceSpec tol{1e-14, 1e-13, 200, 20};
    const auto& z = tr.nodes();
    for (std::size_t i = 1; i < tr.size(); ++i) {
        // On one segment the integrand is a quartic.
        const double za = z[i - 1], zb = z[i];
        auto f = [&](double s) {
            // Clamp to the segment so the interpolant picks the right piece.
            return tr.value(std::clamp(s, std::min(za, zb), std::max(za, zb)), 0);
        };
        w_nodes_[i] = w_nodes_[i - 1] + adaptive_quadrature(f, za, zb, tol).value;
    }
}

double Trajectory::Y(double z) const { return ivp_.trajectory.value(z, 0); }

double Trajectory::Yp(double z) const {
    const auto& tr = ivp_.trajectory;
    const double guess = tr.derivative(z, 0);
    State x{tr.value(z, 0)};
    if (rc_.id == CaseId::G_H3) x.push_back(tr.value(z, 1));
    try {
        return ode_.resolve(z, x, guess).slope;
    } catch (const Error&) {
        return guess;
    }
}

double Trajectory::W(double z) const {
    const auto& tr = ivp_.trajectory;
    if (rc_.id == CaseId::G_H3) return tr.value(z, 1);
    const auto& nodes = tr.nodes();
    if (nodes.size() == 1) return w0_;
    const bool forward = nodes.back() >= nodes.front();
    // Nearest node at or before z in integration order.
    std::size_t i;
    if (forward) {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
        i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    } else {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), z, std::greater<>{});
        i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    }
    if (i + 1 >= nodes.size()) i = nodes.size() - 2;
    const double za = nodes[i];
    if (z == za) return w_nodes_[i];
    (void)tr.value(z, 0);  // range check
    const ToleranceSpec tol{1e-14, 1e-13, 200, 20};
    const double lo = std::min(za, nodes[i + 1]), hi = std::max(za, nodes[i + 1]);
    auto f = [&](double s) { return tr.value(std::clamp(s, lo, hi), 0); };
    return w_nodes_[i] + adaptive_quadrature(f, za, z, tol).value;
}

std::vector<std::array<double, 3>> Trajectory::table() const {
    const auto& tr = ivp_.trajectory;
    std::vector<std::array<double, 3>> out;
    for (std::size_t i = 0; i < tr.size(); ++i) out.push_back({tr.nodes()[i], tr.node_state(i)[0], w_nodes_[i]});
    return out;
}

std::vector<std::array<double, 3>> Trajectory::resample(std::size_t samples) const {
    if (samples < 2) throw ParamError("resample needs at least 2 samples");
    std::vector<std::array<double, 3>> out;
    const double a = z_begin(), b = z_end();
    for (std::size_t i = 0; i < samples; ++i) {
        const double z = i + 1 == samples ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(samples - 1);
        out.push_back({z, Y(z), W(z)});
    }
    return out;
}

Trajectory solve_reduction(const ReductionCase& rc, double z0, double z1, double Y0, const ReductionOptions& opt) {
    auto ode = std::make_shared<ReducedOde>(rc);
    if (rc.id == CaseId::G_H2 && (!(z0 > 0.0) || !(z1 > 0.0))) {
        throw DomainError("case g_h2 has z = S, so the z-range must be positive");
    }
    State x0{Y0};
    if (ode->state_size() == 2) x0.push_back(opt.w0);
    const double s0 = opt.initial_slope ? *opt.initial_slope : ode->branch_slope(z0, x0, opt.branch);
    IvpResult res = solve_ivp(ode->system(), x0, s0, z0, z1, opt.ivp);
    return Trajectory(rc, std::move(res), opt.w0);
}

ClosedForm numerical_invariant_surface(const Trajectory& tr) {
    auto shared = std::make_shared<const Trajectory>(tr);
    const Chart chart(tr.reduction_case());
    JetFn fn = [shared, chart](double S, double t) {
        const double z = chart.z(S, t);
        return chart.jet(S, t, shared->W(z), shared->Y(z), shared->Yp(z));
    };
    return ClosedForm("numerical invariant " + to_string(tr.reduction_case().id), fn);
}

GridSurface reconstruct_grid(const Trajectory& tr, const SampleGrid& grid) {
    grid.validate();
    const Chart chart(tr.reduction_case());
    std::vector<double> u;
    u.reserve(grid.S.size() * grid.t.size());
    for (double t : grid.t) {
        for (double S : grid.S) u.push_back(chart.u(S, t, tr.W(chart.z(S, t))));
    }
    return GridSurface(grid.S, grid.t, std::move(u));
}

SampleGrid covered_grid(double gamma, double z_lo, double z_hi, double t0, double t1, std::size_t n_s,
                        std::size_t n_t) {
    const double s_lo = std::exp(z_lo + std::max(gamma * t0, gamma * t1));
    const double s_hi = std::exp(z_hi + std::min(gamma * t0, gamma * t1));
    if (!(s_hi > s_lo)) throw GridError("the z-range is too narrow for the requested t-range");
    return SampleGrid::uniform(s_lo, s_hi, n_s, t0, t1, n_t);
}

}  // namespace hedgesym
