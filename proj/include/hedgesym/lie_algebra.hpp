#pragma once

/**
 * @file lie_algebra.hpp
 * @brief Affine symmetry generators, brackets, structure constants and flows.
 *
 * A generator xi d/dS + tau d/dt + phi d/du has coefficients affine in
 * x = (S, t, u). Writing each as a0 + M x, the bracket of A = (a0, M) and
 * B = (b0, N) is again affine:
 *
 *     [A, B] = (N a0 - M b0) + (N M - M N) x
 *
 * General model (any g):        V1 = S dS + u du, V2 = du, V3 = dt
 * Power g (haupt equation):     V1 = S dS, V2 = u du, V3 = du, V4 = dt
 */

#include "hedgesym/surface.hpp"

#include <boost/rational.hpp>
#include <json.hpp>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hedgesym {

using Rational = boost::rational<long long>;

/// Coordinate order S, t, u.
enum Coord : std::size_t { kS = 0, kT = 1, kU = 2 };

template <class T>
struct AffineVectorField {
    // Explicit zeros: value-initialising arrays of boost::rational with {}
    // leaves some denominators at 0 under GCC in C++20 mode.
    std::array<T, 3> a0{T(0), T(0), T(0)};  // constant parts of (xi, tau, phi)
    // m[i][j]: coefficient of x_j in component i
    std::array<std::array<T, 3>, 3> m{{{T(0), T(0), T(0)}, {T(0), T(0), T(0)}, {T(0), T(0), T(0)}}};

    /// Component i at the point x.
    T component(std::size_t i, const std::array<T, 3>& x) const {
        T v = a0[i];
        for (std::size_t j = 0; j < 3; ++j) v += m[i][j] * x[j];
        return v;
    }

    AffineVectorField& operator+=(const AffineVectorField& o) {
        for (std::size_t i = 0; i < 3; ++i) {
            a0[i] += o.a0[i];
            for (std::size_t j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
        }
        return *this;
    }
    friend AffineVectorField operator+(AffineVectorField a, const AffineVectorField& b) { return a += b; }
    friend AffineVectorField operator*(const T& s, AffineVectorField a) {
        for (std::size_t i = 0; i < 3; ++i) {
            a.a0[i] *= s;
            for (std::size_t j = 0; j < 3; ++j) a.m[i][j] *= s;
        }
        return a;
    }
    friend AffineVectorField operator-(const AffineVectorField& a) { return T(-1) * a; }
    friend bool operator==(const AffineVectorField&, const AffineVectorField&) = default;

    bool is_zero() const { return *this == AffineVectorField{}; }
};

using ExactField = AffineVectorField<Rational>;
using RealField = AffineVectorField<double>;

template <class T>
AffineVectorField<T> commutator(const AffineVectorField<T>& A, const AffineVectorField<T>& B) {
    AffineVectorField<T> r;
    for (std::size_t i = 0; i < 3; ++i) {
        T c(0);
        for (std::size_t j = 0; j < 3; ++j) c += B.m[i][j] * A.a0[j] - A.m[i][j] * B.a0[j];
        r.a0[i] = c;
        for (std::size_t k = 0; k < 3; ++k) {
            T v(0);
            for (std::size_t j = 0; j < 3; ++j) v += B.m[i][j] * A.m[j][k] - A.m[i][j] * B.m[j][k];
            r.m[i][k] = v;
        }
    }
    return r;
}

RealField to_real(const ExactField& f);

/// "S*d/dS + u*d/du" style rendering.
std::string to_string(const ExactField& f);

enum class Basis { L3, L4 };

std::string to_string(Basis b);
/// Accepts "L3"/"l3"/"L4"/"l4". @throws ParamError otherwise.
Basis parse_basis(const std::string& s);

/// Generators in the order V1, V2, ...
std::vector<ExactField> generators(Basis b);

/// Coefficients of f in the given generators. @throws BasisError if f is not in their span.
std::vector<Rational> expand_in_basis(const ExactField& f, const std::vector<ExactField>& basis);

struct StructureTable {
    Basis basis;
    std::size_t dim = 0;
    /// c[(i * dim + j) * dim + k]: coefficient of V_k in [V_i, V_j] (0-based).
    std::vector<Rational> c;

    Rational at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * dim + j) * dim + k]; }

    /// Bracket [V_i, V_j] as a combination of the basis, 0-based indices.
    std::vector<Rational> bracket(std::size_t i, std::size_t j) const;

    bool antisymmetric() const;
    /// Largest |coefficient| of the Jacobi sum over all triples (exactly 0 for a Lie algebra).
    Rational jacobi_defect() const;

    struct Entry {
        std::size_t i, j;  // 1-based, i < j
        std::vector<Rational> value;
    };
    std::vector<Entry> nonzero() const;

    /// Aligned text table of [V_i, V_j].
    std::string to_text() const;
    nlohmann::json to_json() const;
};

StructureTable structure_constants(Basis b);

struct Point3 {
    double S;
    double t;
    double u;
};

/// Exact flow exp(eps V) for V in the diagonal-plus-translation class
/// (each component depends only on its own coordinate).
/// @throws UnsupportedFieldError otherwise.
Point3 flow(const RealField& V, double eps, const Point3& p);

/// Pushes the graph of u forward by exp(eps V). Power/exponential series map
/// to series, other closed forms are wrapped with the chain rule, and grids
/// are re-gridded (axes mapped, values mapped).
SolutionSurface transform_solution(const RealField& V, double eps, const SolutionSurface& u);

/// Optimal systems of subalgebras, as data.
struct SubalgebraEntry {
    std::string id;
    std::size_t dimension;
    std::vector<std::string> generators;  // textual, in terms of V_i and the parameters (x, phi, eps)
};

const std::vector<SubalgebraEntry>& optimal_system(Basis b);

/// One-dimensional subalgebra generators with their parameters substituted.
/// L3: h2 = V1 cos(phi) + V3 sin(phi), h3 = V2 + eps V3.
/// L4: h2 = V1 cos(phi) + V4 sin(phi), h3 = V2 + x (V1 cos(phi) + V4 sin(phi)),
///     h4 = V3 + eps (V1 cos(phi) + V4 sin(phi)).
RealField l3_h2(double phi);
RealField l3_h3(int eps);
RealField l4_h2(double phi);
RealField l4_h3(double phi, double x);
RealField l4_h4(double phi, int eps);

/// Decomposition remarks recorded as documentation only.
std::string decomposition_note(Basis b);

}  // namespace hedgesym
