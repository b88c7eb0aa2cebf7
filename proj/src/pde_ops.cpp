#include "hedgesym/pde_ops.hpp"

#include "hedgesym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hedgesym {

std::string to_string(SpecialModel m) {
    switch (m) {
        case SpecialModel::Frey: return "frey";
        case SpecialModel::Haupt: return "haupt";
        case SpecialModel::Sipa: return "sipa";
    }
    return "unknown";
}

void SpecialParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParamError("sigma > 0 required");
    if (!std::isfinite(c1)) throw ParamError("c1 must be finite");
    switch (model) {
        case SpecialModel::Frey:
            if (!(rho >= 0.0)) throw ParamError("rho >= 0 required");
            break;
        case SpecialModel::Haupt:
            if (c1 == 0.0) throw ParamError("c1 != 0 required");
            break;
        case SpecialModel::Sipa:
            if (c1 == 0.0) throw ParamError("c1 != 0 required");
            if (k == 0.0 || !std::isfinite(k)) throw ParamError("k != 0 required");
            break;
    }
}

double black_scholes_residual(double sigma, double S, const Jet& j) {
    return j.u_t + 0.5 * sigma * sigma * S * S * j.u_SS;
}

namespace {

bool guard_flags(double denominator, double sigma, double S, double u_SS) {
    if (u_SS == 0.0) return false;
    return std::abs(denominator) < kGuardTolerance * (1.0 + std::abs(sigma * sigma * S * S * u_SS));
}

PointResidual finish(double u_t, double numerator, double denominator, double sigma, double S, double u_SS) {
    PointResidual r;
    r.margin = denominator;
    r.flagged = guard_flags(denominator, sigma, S, u_SS);
    if (r.flagged) {
        r.residual = std::nan("");
    } else if (u_SS == 0.0) {
        r.residual = u_t;
    } else {
        r.residual = u_t + 0.5 * numerator / (denominator * denominator);
    }
    return r;
}

}  // namespace

PointResidual residual_general_at(const ReactionFunction& g, const ModelParams& p, double S, const Jet& j) {
    double feedback = 0.0;
    if (p.rho != 0.0) feedback = p.rho * log_derivative_g(g, p.rho * j.u_S);
    const double den = 1.0 - feedback * S * j.u_SS;
    return finish(j.u_t, p.sigma * p.sigma * S * S * j.u_SS, den, p.sigma, S, j.u_SS);
}

PointResidual residual_special_at(const SpecialParams& p, double S, const Jet& j) {
    const double s2 = p.sigma * p.sigma;
    switch (p.model) {
        case SpecialModel::Frey: {
            const double den = 1.0 - p.rho * p.c1 * S * j.u_SS;
            return finish(j.u_t, s2 * S * S * j.u_SS, den, p.sigma, S, j.u_SS);
        }
        case SpecialModel::Haupt: {
            const double den = j.u_S - p.c1 * S * j.u_SS;
            return finish(j.u_t, s2 * S * S * j.u_SS * j.u_S * j.u_S, den, p.sigma, S, j.u_SS);
        }
        case SpecialModel::Sipa: {
            const double a = 1.0 + p.k * j.u_S;
            const double den = p.c1 * (a + (p.k / p.c1) * S * j.u_SS);
            return finish(j.u_t, s2 * a * a * S * S * j.u_SS, den, p.sigma, S, j.u_SS);
        }
    }
    throw ParamError("unknown special model");
}

nlohmann::json ResidualReport::to_json() const {
    return nlohmann::json{{"max_residual", max_residual},
                          {"rms_residual", rms_residual},
                          {"guard_violations", guard_violations},
                          {"n_interior", n_interior}};
}

Jet GridDerivatives::jet(std::size_t iS, std::size_t it) const {
    const std::size_t k = it * S.size() + iS;
    return {u[k], u_t[k], u_S[k], u_SS[k]};
}

namespace {

bool is_uniform(const std::vector<double>& x) {
    const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::abs((x[i] - x[i - 1]) - h) > 1e-12 * std::max(std::abs(h), 1e-300) + 1e-14 * std::abs(x[i])) {
            return false;
        }
    }
    return true;
}

struct Stencil {
    // weights for (x[i-1], x[i], x[i+1])
    double d1[3];
    double d2[3];
};

std::vector<Stencil> stencils(const std::vector<double>& x) {
    const bool uni = is_uniform(x);
    const double hu = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
    std::vector<Stencil> out;
    out.reserve(x.size() - 2);
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        Stencil s{};
        if (uni) {
            s.d1[0] = -0.5 / hu;
            s.d1[1] = 0.0;
            s.d1[2] = 0.5 / hu;
            s.d2[0] = 1.0 / (hu * hu);
            s.d2[1] = -2.0 / (hu * hu);
            s.d2[2] = 1.0 / (hu * hu);
        } else {
            const double h1 = x[i] - x[i - 1];
            const double h2 = x[i + 1] - x[i];
            s.d1[0] = -h2 / (h1 * (h1 + h2));
            s.d1[1] = (h2 - h1) / (h1 * h2);
            s.d1[2] = h1 / (h2 * (h1 + h2));
            s.d2[0] = 2.0 / (h1 * (h1 + h2));
            s.d2[1] = -2.0 / (h1 * h2);
            s.d2[2] = 2.0 / (h2 * (h1 + h2));
        }
        out.push_back(s);
    }
    return out;
}

}  // namespace

GridDerivatives grid_derivatives(const GridSurface& u) {
    if (u.n_S() < 5 || u.n_t() < 5) throw GridError("grid surfaces need at least 5 points per axis");
    const auto sS = stencils(u.S());
    const auto sT = stencils(u.t());
    GridDerivatives d;
    d.S.assign(u.S().begin() + 1, u.S().end() - 1);
    d.t.assign(u.t().begin() + 1, u.t().end() - 1);
    const std::size_t n = d.S.size() * d.t.size();
    d.u.reserve(n);
    d.u_t.reserve(n);
    d.u_S.reserve(n);
    d.u_SS.reserve(n);
    for (std::size_t it = 1; it + 1 < u.n_t(); ++it) {
        const Stencil& st = sT[it - 1];
        for (std::size_t iS = 1; iS + 1 < u.n_S(); ++iS) {
            const Stencil& ss = sS[iS - 1];
            const double um = u.at(iS - 1, it), u0 = u.at(iS, it), up = u.at(iS + 1, it);
            d.u.push_back(u0);
            d.u_S.push_back(ss.d1[0] * um + ss.d1[1] * u0 + ss.d1[2] * up);
            d.u_SS.push_back(ss.d2[0] * um + ss.d2[1] * u0 + ss.d2[2] * up);
            d.u_t.push_back(st.d1[0] * u.at(iS, it - 1) + st.d1[1] * u0 + st.d1[2] * u.at(iS, it + 1));
        }
    }
    return d;
}

namespace {

using PointFn = std::function<PointResidual(double S, const Jet&)>;

ResidualReport evaluate(const PointFn& f, const SolutionSurface& surface, const SampleGrid& grid) {
    ResidualReport rep;
    auto add = [&](double S, double t, const Jet& j) {
        const PointResidual r = f(S, j);
        rep.points.push_back({S, t, r.residual, r.margin, r.flagged});
    };
    if (const auto* cf = std::get_if<ClosedForm>(&surface)) {
        grid.validate();
        for (double t : grid.t) {
            for (double S : grid.S) add(S, t, cf->jet(S, t));
        }
    } else {
        const auto d = grid_derivatives(std::get<GridSurface>(surface));
        for (std::size_t it = 0; it < d.t.size(); ++it) {
            for (std::size_t iS = 0; iS < d.S.size(); ++iS) add(d.S[iS], d.t[it], d.jet(iS, it));
        }
    }
    rep.n_interior = rep.points.size();
    double sum2 = 0.0;
    std::size_t used = 0;
    for (const auto& p : rep.points) {
        if (p.flagged) {
            ++rep.guard_violations;
            continue;
        }
        const double a = std::abs(p.residual);
        rep.max_residual = std::isnan(a) ? a : std::max(rep.max_residual, a);
        sum2 += p.residual * p.residual;
        ++used;
    }
    rep.rms_residual = used ? std::sqrt(sum2 / static_cast<double>(used)) : 0.0;
    return rep;
}

ResidualReport throw_if_all_flagged(ResidualReport rep) {
    if (rep.n_interior > 0 && rep.guard_violations == rep.n_interior) {
        throw GuardError("denominator guard violated at every interior point", rep.guard_violations,
                         rep.n_interior);
    }
    return rep;
}

}  // namespace

ResidualReport evaluate_general(const ReactionFunction& g, const ModelParams& p, const SolutionSurface& u,
                                const SampleGrid& grid) {
    return evaluate([&](double S, const Jet& j) { return residual_general_at(g, p, S, j); }, u, grid);
}

ResidualReport evaluate_special(const SpecialParams& p, const SolutionSurface& u, const SampleGrid& grid) {
    p.validate();
    return evaluate([&](double S, const Jet& j) { return residual_special_at(p, S, j); }, u, grid);
}

ResidualReport residual_general(const ReactionFunction& g, const ModelParams& p, const SolutionSurface& u,
                                const SampleGrid& grid) {
    return throw_if_all_flagged(evaluate_general(g, p, u, grid));
}

ResidualReport residual_special(const SpecialParams& p, const SolutionSurface& u, const SampleGrid& grid) {
    return throw_if_all_flagged(evaluate_special(p, u, grid));
}

}  // namespace hedgesym
