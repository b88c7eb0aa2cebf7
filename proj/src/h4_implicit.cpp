#include "hedgesym/h4_implicit.hpp"

#include "hedgesym/errors.hpp"
#include "hedgesym/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hedgesym {

H4Constants H4Constants::from(const DerivedParams& d) {
    H4Constants c{DerivedParams::need(d.beta, "beta"),   DerivedParams::need(d.gamma, "gamma"),
                  DerivedParams::need(d.kappa, "kappa"), DerivedParams::need(d.eta, "eta"),
                  DerivedParams::need(d.theta, "theta"), DerivedParams::need(d.zeta, "zeta"),
                  DerivedParams::need(d.a1, "a1")};
    if (!(c.theta > 0.0)) throw ParamError("theta > 0 required for the real square-root branch");
    return c;
}

double h4_radicand(const H4Constants& c, double Y) { return c.theta * Y * (Y - c.zeta); }

double h4_integrand(const H4Constants& c, double Y) {
    if (!(Y > 0.0)) throw DomainError("the S_H4 integrand needs Y > 0");
    const double R = h4_radicand(c, Y);
    if (R < 0.0) throw DomainError("negative radicand: no real branch at this Y");
    const double A = c.eta - c.gamma * Y;
    return 2.0 * A / (Y * (2.0 * c.beta * A - c.kappa * Y - std::sqrt(R)));
}

double h4_integrand_printed(const H4Constants& c, double Y) {
    const double R = h4_radicand(c, Y);
    if (!(R > 0.0)) throw DomainError("non-positive radicand");
    return 2.0 * (c.eta - c.gamma * Y) / std::sqrt(R);
}

namespace {

double antiderivative(const H4Constants& c, double Y, double last_coef) {
    if (!(Y > 0.0)) throw DomainError("the implicit solution needs Y > 0");
    const double R = h4_radicand(c, Y);
    if (R < 0.0) throw DomainError("negative radicand: no real branch at this Y");
    const double b = c.beta;
    const double m = c.m();
    const double sq = std::sqrt(R);  // = sqrt(Y (theta Y - a1)) since a1 = theta zeta
    const double arg2 = c.theta * Y - 0.5 * c.a1 + std::sqrt(c.theta) * sq;
    const double arg3 = Y * last_coef - 2.0 * b * b * (b - 1.0) * c.eta + b * (b - 2.0) * sq;
    if (!(arg2 > 0.0)) throw DomainError("logarithm argument is not positive");
    double rhs = 2.0 * m * std::log(Y) - b * std::sqrt(c.theta) * std::log(arg2);
    if (b != 2.0) {
        if (arg3 == 0.0) throw DomainError("logarithmic pole of the implicit solution");
        rhs += (b - 2.0) * c.kappa * std::log(std::abs(arg3));
    }
    return rhs;
}

}  // namespace

double h4_antiderivative(const H4Constants& c, double Y) {
    const double b = c.beta;
    return antiderivative(c, Y, 2.0 * b * b * (b - 1.0) * c.gamma + c.kappa * ((b - 1.0) * (b - 1.0) + 1.0));
}

double h4_antiderivative_printed(const H4Constants& c, double Y) {
    const double b = c.beta;
    return antiderivative(c, Y, b * b * (c.kappa + 2.0 * c.gamma * (b - 1.0)));
}

std::string to_string(H4Mode m) { return m == H4Mode::ClosedForm ? "closed-form" : "quadrature"; }

H4Implicit::H4Implicit(const H4Constants& c, double d1, bool force_quadrature) : c_(c), d1_(d1) {
    const auto crit = critical_points();
    y_lo_ = crit.empty() ? 0.0 : crit.back();
    y_anchor_ = y_lo_ + 1.0;
    z_anchor_ = -d1_ / (2.0 * c_.beta * c_.m());

    if (force_quadrature || c_.eta < 0.0) {
        mode_ = H4Mode::Quadrature;
        return;
    }
    // Check d/dY of the closed form against the integrand on the segment.
    const double scale = std::max(1.0, y_lo_);
    const double a = y_lo_ + 0.05 * scale;
    const double b = y_lo_ + 100.0 * scale;
    double worst = 0.0;
    constexpr int n = 40;
    for (int i = 0; i <= n; ++i) {
        const double Y = a * std::pow(b / a, static_cast<double>(i) / n);
        const double h = 1e-4 * Y;
        const double fd = (-z_closed(Y + 2 * h) + 8 * z_closed(Y + h) - 8 * z_closed(Y - h) + z_closed(Y - 2 * h)) /
                          (12.0 * h);
        const double f = h4_integrand(c_, Y);
        worst = std::max(worst, std::abs(fd - f) / std::max(1.0, std::abs(f)));
    }
    validation_error_ = worst;
    if (!(worst < 1e-8)) mode_ = H4Mode::Quadrature;
}

std::vector<double> H4Implicit::critical_points() const {
    std::vector<double> out;
    for (double v : {c_.zeta, c_.y_star(), c_.eta / c_.gamma}) {
        if (v > 0.0 && std::isfinite(v)) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double H4Implicit::z_closed(double Y) const { return (h4_antiderivative(c_, Y) - d1_) / (2.0 * c_.beta * c_.m()); }

double H4Implicit::z_quadrature(double Y) const {
    const ToleranceSpec tol{1e-14, 1e-12, 200, 15};
    return z_anchor_ + integrate([&](double y) { return h4_integrand(c_, y); }, y_anchor_, Y, tol);
}

double H4Implicit::z(double Y) const { return mode_ == H4Mode::ClosedForm ? z_closed(Y) : z_quadrature(Y); }

double H4Implicit::z_lower() const {
    try {
        const double v = z(y_lo_);
        if (std::isfinite(v)) return v;
    } catch (const Error&) {
    }
    const double up = dz_dY(y_anchor_);
    return up > 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
}

double H4Implicit::invert(double target) const {
    const double dir = dz_dY(y_anchor_) > 0.0 ? 1.0 : -1.0;
    auto g = [&](double Y) { return dir * (z(Y) - target); };

    // Upper end: grow geometrically until g changes sign.
    double hi = y_anchor_;
    double ghi = g(hi);
    double lo = y_lo_;
    if (ghi < 0.0) {
        int k = 0;
        while (ghi < 0.0) {
            lo = hi;
            hi = y_lo_ + (hi - y_lo_) * 2.0;
            ghi = g(hi);
            if (++k > 200) throw BracketError("target z beyond the monotone segment");
        }
    } else {
        // Lower end: approach y_lo from above.
        const double scale = std::max(1.0, y_lo_);
        double glo = 1.0;
        for (int k = 1; k <= 60; ++k) {
            lo = y_lo_ + scale * std::ldexp(1.0, -k);
            try {
                glo = g(lo);
            } catch (const Error&) {
                continue;
            }
            if (glo <= 0.0) break;
        }
        if (glo > 0.0) {
            try {
                lo = y_lo_;
                glo = g(lo);
            } catch (const Error&) {
                glo = 1.0;
            }
            if (!(glo <= 0.0)) throw BracketError("target z below the monotone segment");
        }
    }
    return find_root_bracketed(g, lo, hi, ToleranceSpec{1e-300, 1e-15, 400, 50});
}

double implicit_solution_h4(const DerivedParams& d, double Y, double d1) {
    const H4Constants c = H4Constants::from(d);
    return (h4_antiderivative(c, Y) - d1) / (2.0 * c.beta * c.m());
}

std::vector<std::array<double, 2>> h4_curve(const H4Implicit& h, double z_lo, double z_hi, double y_hi,
                                            std::size_t n) {
    if (n < 2) throw ParamError("the curve needs at least 2 points");
    const double z_top = h.z(y_hi);
    const bool clipped = z_top < z_hi;
    const double z_end = clipped ? z_top : z_hi;
    if (!(z_end > z_lo)) throw ParamError("empty curve window");
    std::vector<std::array<double, 2>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = i + 1 == n ? z_end : z_lo + (z_end - z_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        const double Y = (i + 1 == n && clipped) ? y_hi : h.invert(z);
        out.push_back({z, Y});
    }
    return out;
}

double h4_w_increment(const H4Implicit& h, double y_ref, double y) {
    if (y == y_ref) return 0.0;
    const ToleranceSpec tol{1e-14, 1e-12, 200, 15};
    return integrate([&](double v) { return v * h.dz_dY(v); }, y_ref, y, tol);
}

GridSurface invert_and_reconstruct(const H4Implicit& h, const SampleGrid& grid, double w0) {
    grid.validate();
    const double gamma = h.constants().gamma;
    const double eta = h.constants().eta;
    // Invert every point, then accumulate W over the sorted Y values so that
    // each increment is a short quadrature.
    const std::size_t n = grid.S.size() * grid.t.size();
    std::vector<double> Y(n);
    for (std::size_t it = 0; it < grid.t.size(); ++it) {
        for (std::size_t iS = 0; iS < grid.S.size(); ++iS) {
            Y[it * grid.S.size() + iS] = h.invert(std::log(grid.S[iS]) - gamma * grid.t[it]);
        }
    }
    const bool increasing = h.dz_dY(h.segment_lower() + 1.0) > 0.0;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    // z_ref is the smallest z on the grid: the smallest Y when z increases with Y.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return increasing ? Y[a] < Y[b] : Y[a] > Y[b]; });
    std::vector<double> u(n);
    double W = w0;
    double prev = Y[order.front()];
    for (std::size_t i : order) {
        W += h4_w_increment(h, prev, Y[i]);
        prev = Y[i];
        u[i] = W + eta * grid.t[i / grid.S.size()];
    }
    return GridSurface(grid.S, grid.t, std::move(u));
}

namespace {

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

void check_tau(double theta, double tau) {
    if (theta - tau * tau == 0.0) throw DomainError("tau^2 = theta");
}

}  // namespace

double h4_euler_rational(const H4Constants& c, double tau, int sign, bool printed_constants) {
    check_tau(c.theta, tau);
    if (c.zeta == 0.0) throw ParamError("zeta = 0: degenerate Euler substitution");
    const double tz = c.theta * c.zeta;
    const double e = printed_constants ? 1.0 : c.eta;
    const double b2 = 2.0 * c.beta * e / tz;
    const double b0 = c.kappa + 2.0 * c.beta * c.gamma - 2.0 * c.beta * e / c.zeta;
    const double q = b2 * tau * tau + sign * tau + b0;
    return -4.0 * c.eta / tz * tau / q + 4.0 * c.gamma * tau / ((c.theta - tau * tau) * q);
}

double h4_euler_substituted(const H4Constants& c, double tau, int sign) {
    check_tau(c.theta, tau);
    const double D = c.theta - tau * tau;
    const double Y = c.theta * c.zeta / D;
    const double dY = 2.0 * c.theta * c.zeta * tau / (D * D);
    const double s = sign * sgn(Y * tau);
    const double A = c.eta - c.gamma * Y;
    const double R = std::max(0.0, h4_radicand(c, Y));
    return 2.0 * A / (Y * (2.0 * c.beta * A - c.kappa * Y - s * std::sqrt(R))) * dY;
}

double euler_substitution_check(const H4Constants& c, std::span<const double> taus, int sign,
                                bool printed_constants) {
    if (c.zeta == 0.0) throw ParamError("zeta = 0: degenerate Euler substitution");
    double worst = 0.0;
    for (double tau : taus) {
        const double r = h4_euler_rational(c, tau, sign, printed_constants);
        const double s = h4_euler_substituted(c, tau, sign);
        worst = std::max(worst, std::abs(s - r) / std::max(1.0, std::abs(r)));
    }
    return worst;
}

double euler_substitution_check_h3(const DerivedParams& d, std::span<const double> taus, int sign) {
    const double beta = DerivedParams::need(d.beta, "beta");
    const double gamma = DerivedParams::need(d.gamma, "gamma");
    const double kappa = DerivedParams::need(d.kappa, "kappa");
    const double delta = DerivedParams::need(d.delta, "delta");
    const double theta = DerivedParams::need(d.theta, "theta");
    const double zeta = DerivedParams::need(d.zeta, "zeta");
    if (zeta == 0.0) throw ParamError("zeta = 0: degenerate Euler substitution");
    const double tz = theta * zeta;
    double worst = 0.0;
    for (double tau : taus) {
        check_tau(theta, tau);
        const double D = theta - tau * tau;
        const double Y = tz / D;
        const double dY = 2.0 * tz * tau / (D * D);
        const double A = delta - gamma * Y;
        const double B = 2.0 * A * (Y - beta) + kappa * Y;
        const double s = sign * sgn(Y * tau);
        const double sq = std::sqrt(std::max(0.0, theta * Y * (Y - zeta)));
        const double lhs = -2.0 * A / (Y * (B + s * sq)) * dY;
        const double P = delta * D - gamma * tz;
        const double rhs = -4.0 * tau * P / (2.0 * P * (tz - beta * D) + kappa * tz * D + sign * tz * tau * D);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return worst;
}

std::vector<double> default_tau_samples(double theta, std::size_t n) {
    if (!(theta > 0.0)) throw ParamError("theta > 0 required");
    const double r = std::sqrt(theta);
    std::vector<double> taus;
    taus.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = -0.98 + 1.96 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        taus.push_back(f * r);
    }
    return taus;
}

}  // namespace hedgesym
