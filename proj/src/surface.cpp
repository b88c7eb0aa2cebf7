#include "hedgesym/surface.hpp"

#include "hedgesym/errors.hpp"
#include "hedgesym/io.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace hedgesym {

Jet PowerExpSeries::jet(double S, double t) const {
    Jet j;
    j.u = constant + t_linear * t;
    j.u_t = t_linear;
    for (const auto& term : terms) {
        if (term.coef == 0.0) continue;
        const double p = term.s_power;
        const double e = std::exp(term.t_rate * t);
        const double sp = p == 0.0 ? 1.0 : std::pow(S, p);
        const double v = term.coef * sp * e;
        j.u += v;
        j.u_t += term.t_rate * v;
        if (p != 0.0) {
            j.u_S += p * v / S;
            j.u_SS += p * (p - 1.0) * v / (S * S);
        }
    }
    return j;
}

ClosedForm::ClosedForm(std::string label, Body body) : label_(std::move(label)), body_(std::move(body)) {
    if (const auto* fn = std::get_if<JetFn>(&body_); fn && !*fn) {
        throw ParamError("closed form '" + label_ + "' has an empty evaluator");
    }
}

Jet ClosedForm::jet(double S, double t) const {
    if (!(S > 0.0)) throw DomainError("closed form evaluated at S <= 0");
    if (const auto* s = std::get_if<PowerExpSeries>(&body_)) return s->jet(S, t);
    return std::get<JetFn>(body_)(S, t);
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) throw GridError("axis needs at least one point");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

void check_axis(const std::vector<double>& ax, const char* name) {
    if (ax.empty()) throw GridError(std::string(name) + " axis is empty");
    for (std::size_t i = 0; i < ax.size(); ++i) {
        if (!std::isfinite(ax[i])) throw GridError(std::string(name) + " axis has a non-finite value");
        if (i > 0 && !(ax[i] > ax[i - 1])) {
            throw GridError(std::string(name) + " axis must be strictly increasing");
        }
    }
}

}  // namespace

SampleGrid SampleGrid::uniform(double s_min, double s_max, std::size_t n_s, double t_min, double t_max,
                               std::size_t n_t) {
    SampleGrid g{linspace(s_min, s_max, n_s), linspace(t_min, t_max, n_t)};
    g.validate();
    return g;
}

SampleGrid SampleGrid::log_uniform(double s_min, double s_max, std::size_t n_s, double t_min, double t_max,
                                   std::size_t n_t) {
    if (!(s_min > 0.0)) throw GridError("S must be positive");
    auto ls = linspace(std::log(s_min), std::log(s_max), n_s);
    for (auto& v : ls) v = std::exp(v);
    ls.front() = s_min;
    ls.back() = s_max;
    SampleGrid g{std::move(ls), linspace(t_min, t_max, n_t)};
    g.validate();
    return g;
}

void SampleGrid::validate() const {
    check_axis(S, "S");
    check_axis(t, "t");
    if (!(S.front() > 0.0)) throw GridError("S values must be positive");
}

GridSurface::GridSurface(std::vector<double> S, std::vector<double> t, std::vector<double> u)
    : S_(std::move(S)), t_(std::move(t)), u_(std::move(u)) {
    SampleGrid{S_, t_}.validate();
    if (u_.size() != S_.size() * t_.size()) throw GridError("grid u has the wrong number of values");
}

void GridSurface::write_csv(std::ostream& os) const {
    static const std::vector<std::string> header{"S", "t", "u"};
    std::vector<std::vector<double>> rows;
    rows.reserve(u_.size());
    for (std::size_t it = 0; it < t_.size(); ++it) {
        for (std::size_t iS = 0; iS < S_.size(); ++iS) rows.push_back({S_[iS], t_[it], at(iS, it)});
    }
    io::write_csv(os, header, rows);
}

void GridSurface::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParamError("cannot open '" + path.string() + "' for writing");
    write_csv(os);
}

GridSurface GridSurface::read_csv(std::istream& is) {
    static const std::vector<std::string> header{"S", "t", "u"};
    const auto rows = io::read_csv(is, header);
    std::map<double, std::size_t> s_index, t_index;
    for (const auto& r : rows) {
        s_index.emplace(r[0], 0);
        t_index.emplace(r[1], 0);
    }
    std::vector<double> S, t;
    for (auto& [v, i] : s_index) {
        i = S.size();
        S.push_back(v);
    }
    for (auto& [v, i] : t_index) {
        i = t.size();
        t.push_back(v);
    }
    if (rows.size() != S.size() * t.size()) {
        throw GridError("CSV surface is not a full rectangular (S,t) lattice");
    }
    std::vector<double> u(rows.size(), std::nan(""));
    std::vector<bool> seen(rows.size(), false);
    for (const auto& r : rows) {
        const std::size_t k = t_index[r[1]] * S.size() + s_index[r[0]];
        if (seen[k]) throw GridError("CSV surface has a duplicate (S,t) point");
        seen[k] = true;
        u[k] = r[2];
    }
    return GridSurface(std::move(S), std::move(t), std::move(u));
}

GridSurface GridSurface::read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParamError("cannot open '" + path.string() + "'");
    return read_csv(is);
}

GridSurface sample(const ClosedForm& f, const SampleGrid& grid) {
    grid.validate();
    std::vector<double> u;
    u.reserve(grid.S.size() * grid.t.size());
    for (double t : grid.t) {
        for (double S : grid.S) u.push_back(f.value(S, t));
    }
    return GridSurface(grid.S, grid.t, std::move(u));
}

}  // namespace hedgesym
