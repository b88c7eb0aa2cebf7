#include "hedgesym/lie_algebra.hpp"

#include "hedgesym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace hedgesym {

RealField to_real(const ExactField& f) {
    RealField r;
    for (std::size_t i = 0; i < 3; ++i) {
        r.a0[i] = boost::rational_cast<double>(f.a0[i]);
        for (std::size_t j = 0; j < 3; ++j) r.m[i][j] = boost::rational_cast<double>(f.m[i][j]);
    }
    return r;
}

namespace {

const char* kNames[3] = {"S", "t", "u"};

std::string rat(const Rational& r) {
    std::ostringstream os;
    os << r.numerator();
    if (r.denominator() != 1) os << '/' << r.denominator();
    return os.str();
}

std::string combination(const std::vector<Rational>& v) {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] == Rational(0)) continue;
        const Rational a = boost::abs(v[k]);
        if (out.empty()) {
            out += v[k] < Rational(0) ? "-" : "";
        } else {
            out += v[k] < Rational(0) ? " - " : " + ";
        }
        if (a != Rational(1)) out += rat(a) + "*";
        out += "V" + std::to_string(k + 1);
    }
    return out.empty() ? "0" : out;
}

}  // namespace

std::string to_string(const ExactField& f) {
    std::string out;
    for (std::size_t i = 0; i < 3; ++i) {
        std::string coef;
        auto add = [&](const Rational& r, const std::string& sym) {
            if (r == Rational(0)) return;
            const Rational a = boost::abs(r);
            if (coef.empty()) {
                coef += r < Rational(0) ? "-" : "";
            } else {
                coef += r < Rational(0) ? " - " : " + ";
            }
            if (sym.empty()) {
                coef += rat(a);
            } else {
                coef += (a != Rational(1) ? rat(a) + "*" : "") + sym;
            }
        };
        add(f.a0[i], "");
        for (std::size_t j = 0; j < 3; ++j) add(f.m[i][j], kNames[j]);
        if (coef.empty()) continue;
        const bool compound = coef.find(' ') != std::string::npos;
        const std::string prefix = coef == "1" ? "" : (compound ? "(" + coef + ")" : coef) + "*";
        const std::string term = prefix + "d/d" + kNames[i];
        out += out.empty() ? term : " + " + term;
    }
    return out.empty() ? "0" : out;
}

std::string to_string(Basis b) { return b == Basis::L3 ? "L3" : "L4"; }

Basis parse_basis(const std::string& s) {
    if (s == "L3" || s == "l3") return Basis::L3;
    if (s == "L4" || s == "l4") return Basis::L4;
    throw ParamError("unknown algebra '" + s + "' (expected L3 or L4)");
}

std::vector<ExactField> generators(Basis b) {
    auto scaling = [](std::initializer_list<std::size_t> coords) {
        ExactField f;
        for (auto c : coords) f.m[c][c] = 1;
        return f;
    };
    auto translation = [](std::size_t c) {
        ExactField f;
        f.a0[c] = 1;
        return f;
    };
    if (b == Basis::L3) return {scaling({kS, kU}), translation(kU), translation(kT)};
    return {scaling({kS}), scaling({kU}), translation(kU), translation(kT)};
}

std::vector<Rational> expand_in_basis(const ExactField& f, const std::vector<ExactField>& basis) {
    // Each field is a vector of 12 rationals; solve basis * c = f by elimination.
    auto flat = [](const ExactField& v) {
        std::vector<Rational> out;
        for (std::size_t i = 0; i < 3; ++i) {
            out.push_back(v.a0[i]);
            for (std::size_t j = 0; j < 3; ++j) out.push_back(v.m[i][j]);
        }
        return out;
    };
    const std::size_t n = basis.size();
    const std::size_t rows = 12;
    std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(n + 1));
    for (std::size_t k = 0; k < n; ++k) {
        const auto col = flat(basis[k]);
        for (std::size_t r = 0; r < rows; ++r) a[r][k] = col[r];
    }
    const auto rhs = flat(f);
    for (std::size_t r = 0; r < rows; ++r) a[r][n] = rhs[r];

    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < rows; ++col) {
        std::size_t p = row;
        while (p < rows && a[p][col] == Rational(0)) ++p;
        if (p == rows) throw BasisError("basis fields are linearly dependent");
        std::swap(a[p], a[row]);
        const Rational inv = Rational(1) / a[row][col];
        for (auto& v : a[row]) v *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || a[r][col] == Rational(0)) continue;
            const Rational factor = a[r][col];
            for (std::size_t c = 0; c <= n; ++c) a[r][c] -= factor * a[row][c];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t r = row; r < rows; ++r) {
        if (a[r][n] != Rational(0)) throw BasisError("field " + to_string(f) + " is not in the span of the basis");
    }
    std::vector<Rational> c(n);
    for (std::size_t r = 0; r < pivot_col.size(); ++r) c[pivot_col[r]] = a[r][n];
    return c;
}

std::vector<Rational> StructureTable::bracket(std::size_t i, std::size_t j) const {
    std::vector<Rational> v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = at(i, j, k);
    return v;
}

bool StructureTable::antisymmetric() const {
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t k = 0; k < dim; ++k) {
                if (at(i, j, k) != -at(j, i, k)) return false;
            }
        }
    }
    return true;
}

Rational StructureTable::jacobi_defect() const {
    // [[Vi,Vj],Vk] + [[Vj,Vk],Vi] + [[Vk,Vi],Vj], expanded with the table itself.
    Rational worst = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            for (std::size_t k = 0; k < dim; ++k) {
                for (std::size_t l = 0; l < dim; ++l) {
                    Rational s = 0;
                    for (std::size_t m = 0; m < dim; ++m) {
                        s += at(i, j, m) * at(m, k, l) + at(j, k, m) * at(m, i, l) + at(k, i, m) * at(m, j, l);
                    }
                    worst = std::max(worst, boost::abs(s));
                }
            }
        }
    }
    return worst;
}

std::vector<StructureTable::Entry> StructureTable::nonzero() const {
    std::vector<Entry> out;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i + 1; j < dim; ++j) {
            auto v = bracket(i, j);
            if (std::any_of(v.begin(), v.end(), [](const Rational& r) { return r != Rational(0); })) {
                out.push_back({i + 1, j + 1, std::move(v)});
            }
        }
    }
    return out;
}

std::string StructureTable::to_text() const {
    std::vector<std::vector<std::string>> cells(dim + 1, std::vector<std::string>(dim + 1));
    cells[0][0] = "[Vi,Vj]";
    for (std::size_t i = 0; i < dim; ++i) {
        cells[0][i + 1] = "V" + std::to_string(i + 1);
        cells[i + 1][0] = "V" + std::to_string(i + 1);
        for (std::size_t j = 0; j < dim; ++j) cells[i + 1][j + 1] = combination(bracket(i, j));
    }
    std::vector<std::size_t> width(dim + 1, 0);
    for (const auto& r : cells) {
        for (std::size_t c = 0; c <= dim; ++c) width[c] = std::max(width[c], r[c].size());
    }
    std::ostringstream os;
    os << to_string(basis) << " structure table\n";
    for (const auto& r : cells) {
        for (std::size_t c = 0; c <= dim; ++c) {
            os << std::left << std::setw(static_cast<int>(width[c] + 2)) << r[c];
        }
        os << '\n';
    }
    return os.str();
}

nlohmann::json StructureTable::to_json() const {
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& g : generators(basis)) gens.push_back(to_string(g));
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t i = 0; i < dim; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < dim; ++j) {
            nlohmann::json coeffs = nlohmann::json::array();
            for (const auto& r : bracket(i, j)) coeffs.push_back(rat(r));
            row.push_back(coeffs);
        }
        table.push_back(row);
    }
    nlohmann::json nz = nlohmann::json::array();
    for (const auto& e : nonzero()) {
        nz.push_back({{"i", e.i}, {"j", e.j}, {"bracket", combination(e.value)}});
    }
    return {{"algebra", to_string(basis)},
            {"generators", gens},
            {"brackets", table},
            {"nonzero", nz},
            {"antisymmetric", antisymmetric()},
            {"jacobi_defect", rat(jacobi_defect())}};
}

StructureTable structure_constants(Basis b) {
    const auto gens = generators(b);
    StructureTable t;
    t.basis = b;
    t.dim = gens.size();
    t.c.assign(t.dim * t.dim * t.dim, Rational(0));
    for (std::size_t i = 0; i < t.dim; ++i) {
        for (std::size_t j = 0; j < t.dim; ++j) {
            const auto coeffs = expand_in_basis(commutator(gens[i], gens[j]), gens);
            for (std::size_t k = 0; k < t.dim; ++k) t.c[(i * t.dim + j) * t.dim + k] = coeffs[k];
        }
    }
    return t;
}

namespace {

void require_diagonal(const RealField& V) {
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j && V.m[i][j] != 0.0) {
                throw UnsupportedFieldError("flow is only available for diagonal-plus-translation fields");
            }
        }
    }
}

/// x -> scale * x + shift for the flow of x' = a x + b over eps.
struct AffineMap1 {
    double scale;
    double shift;
    double operator()(double x) const { return scale * x + shift; }
};

AffineMap1 component_flow(double a, double b, double eps) {
    if (a == 0.0) return {1.0, b * eps};
    return {std::exp(a * eps), b * std::expm1(a * eps) / a};
}

}  // namespace

Point3 flow(const RealField& V, double eps, const Point3& p) {
    require_diagonal(V);
    return {component_flow(V.m[kS][kS], V.a0[kS], eps)(p.S), component_flow(V.m[kT][kT], V.a0[kT], eps)(p.t),
            component_flow(V.m[kU][kU], V.a0[kU], eps)(p.u)};
}

SolutionSurface transform_solution(const RealField& V, double eps, const SolutionSurface& u) {
    require_diagonal(V);
    const AffineMap1 fs = component_flow(V.m[kS][kS], V.a0[kS], eps);
    const AffineMap1 ft = component_flow(V.m[kT][kT], V.a0[kT], eps);
    const AffineMap1 fu = component_flow(V.m[kU][kU], V.a0[kU], eps);
    // Inverse maps on the independent variables.
    const AffineMap1 is = component_flow(V.m[kS][kS], V.a0[kS], -eps);
    const AffineMap1 it = component_flow(V.m[kT][kT], V.a0[kT], -eps);

    if (const auto* grid = std::get_if<GridSurface>(&u)) {
        std::vector<double> S, t, vals;
        for (double s : grid->S()) S.push_back(fs(s));
        for (double tt : grid->t()) t.push_back(ft(tt));
        for (double v : grid->u()) vals.push_back(fu(v));
        return GridSurface(std::move(S), std::move(t), std::move(vals));
    }

    const auto& cf = std::get<ClosedForm>(u);
    const std::string label = cf.label() + " (transformed)";
    if (const auto* series = std::get_if<PowerExpSeries>(&cf.body()); series && is.shift == 0.0) {
        // u~(S~, t~) = fu(u(is.scale S~, it.scale t~ + it.shift))
        PowerExpSeries out;
        for (const auto& term : series->terms) {
            const double coef = fu.scale * term.coef * std::pow(is.scale, term.s_power) *
                                std::exp(term.t_rate * it.shift);
            out.terms.push_back({coef, term.s_power, term.t_rate * it.scale});
        }
        out.t_linear = fu.scale * series->t_linear * it.scale;
        out.constant = fu.scale * (series->constant + series->t_linear * it.shift) + fu.shift;
        return ClosedForm(label, out);
    }

    JetFn fn = [cf, fu, is, it](double S, double t) {
        const double S0 = is(S);
        const double t0 = it(t);
        const Jet j = cf.jet(S0, t0);
        return Jet{fu(j.u), fu.scale * j.u_t * it.scale, fu.scale * j.u_S * is.scale,
                   fu.scale * j.u_SS * is.scale * is.scale};
    };
    return ClosedForm(label, fn);
}

const std::vector<SubalgebraEntry>& optimal_system(Basis b) {
    static const std::vector<SubalgebraEntry> l3{
        {"h1", 1, {"V2"}},
        {"h2", 1, {"V1 cos(phi) + V3 sin(phi)"}},
        {"h3", 1, {"V2 + eps V3"}},
        {"h4", 2, {"V2", "V3"}},
        {"h5", 2, {"V1", "V3"}},
        {"h6", 2, {"V1 + x V3", "V2"}},
    };
    static const std::vector<SubalgebraEntry> l4{
        {"h1", 1, {"V3"}},
        {"h2", 1, {"V1 cos(phi) + V4 sin(phi)"}},
        {"h3", 1, {"V2 + x (V1 cos(phi) + V4 sin(phi))"}},
        {"h4", 1, {"V3 + eps (V1 cos(phi) + V4 sin(phi))"}},
        {"h5", 2, {"V2 + x (V1 cos(phi) + V4 sin(phi))", "V3"}},
        {"h6", 2, {"V2 + x (V1 cos(phi) + V4 sin(phi))", "V1 sin(phi) - V4 cos(phi)"}},
        {"h7", 2, {"V1", "V4"}},
        {"h8", 2, {"V3 + eps (V1 cos(phi) + V4 sin(phi))", "V1 sin(phi) - V4 cos(phi)"}},
        {"h9", 2, {"V3", "V1 sin(phi) - V4 cos(phi)"}},
        {"h10", 3, {"V2", "V1", "V4"}},
        {"h11", 3, {"V3", "V1", "V4"}},
        {"h12", 3, {"V2 + x (V1 cos(phi) + V4 sin(phi))", "V1 sin(phi) - V4 cos(phi)", "V3"}},
    };
    return b == Basis::L3 ? l3 : l4;
}

namespace {

RealField gen(Basis b, std::size_t i) { return to_real(generators(b)[i - 1]); }

}  // namespace

RealField l3_h2(double phi) { return std::cos(phi) * gen(Basis::L3, 1) + std::sin(phi) * gen(Basis::L3, 3); }

RealField l3_h3(int eps) { return gen(Basis::L3, 2) + static_cast<double>(eps) * gen(Basis::L3, 3); }

RealField l4_h2(double phi) { return std::cos(phi) * gen(Basis::L4, 1) + std::sin(phi) * gen(Basis::L4, 4); }

RealField l4_h3(double phi, double x) { return gen(Basis::L4, 2) + x * l4_h2(phi); }

RealField l4_h4(double phi, int eps) { return gen(Basis::L4, 3) + static_cast<double>(eps) * l4_h2(phi); }

std::string decomposition_note(Basis b) {
    if (b == Basis::L3) return "L3 = L2 + <V3> with L2 = <V1, V2>; V3 is central.";
    return "L4 = L2 + <V1> + <V4> with L2 = <V2, V3>; V1 and V4 are central.";
}

}  // namespace hedgesym
