#pragma once

/**
 * @file surface.hpp
 * @brief Candidate solutions u(S, t): closed forms with analytic derivatives
 * and rectangular grid samples.
 */

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hedgesym {

/// Value and the derivatives entering the hedging PDEs at one point.
struct Jet {
    double u = 0.0;
    double u_t = 0.0;
    double u_S = 0.0;
    double u_SS = 0.0;
};

/// coef * S^s_power * exp(t_rate * t)
struct PowerExpTerm {
    double coef;
    double s_power;
    double t_rate;
};

/// sum of PowerExpTerm + t_linear * t + constant
struct PowerExpSeries {
    std::vector<PowerExpTerm> terms;
    double t_linear = 0.0;
    double constant = 0.0;

    Jet jet(double S, double t) const;
};

using JetFn = std::function<Jet(double S, double t)>;

class ClosedForm {
public:
    using Body = std::variant<PowerExpSeries, JetFn>;

    ClosedForm(std::string label, Body body);

    const std::string& label() const noexcept { return label_; }
    const Body& body() const noexcept { return body_; }

    /// @throws DomainError for S <= 0.
    Jet jet(double S, double t) const;
    double value(double S, double t) const { return jet(S, t).u; }

private:
    std::string label_;
    Body body_;
};

/// Sampling lattice; both axes strictly increasing, S > 0.
struct SampleGrid {
    std::vector<double> S;
    std::vector<double> t;

    static SampleGrid uniform(double s_min, double s_max, std::size_t n_s, double t_min, double t_max,
                              std::size_t n_t);
    /// S uniform in ln S.
    static SampleGrid log_uniform(double s_min, double s_max, std::size_t n_s, double t_min, double t_max,
                                  std::size_t n_t);

    /// @throws GridError when an axis is empty, not strictly increasing, or S <= 0.
    void validate() const;
};

/// u sampled on a rectangular (S, t) lattice. Storage is t-major: u[it * nS + iS].
class GridSurface {
public:
    GridSurface(std::vector<double> S, std::vector<double> t, std::vector<double> u);

    const std::vector<double>& S() const noexcept { return S_; }
    const std::vector<double>& t() const noexcept { return t_; }
    const std::vector<double>& u() const noexcept { return u_; }
    std::size_t n_S() const noexcept { return S_.size(); }
    std::size_t n_t() const noexcept { return t_.size(); }

    double at(std::size_t iS, std::size_t it) const { return u_[it * S_.size() + iS]; }

    /// Long format with header `S,t,u`, rows ordered by t then S.
    void write_csv(std::ostream& os) const;
    void write_csv(const std::filesystem::path& path) const;
    static GridSurface read_csv(std::istream& is);
    static GridSurface read_csv(const std::filesystem::path& path);

private:
    std::vector<double> S_;
    std::vector<double> t_;
    std::vector<double> u_;
};

using SolutionSurface = std::variant<ClosedForm, GridSurface>;

GridSurface sample(const ClosedForm& f, const SampleGrid& grid);

}  // namespace hedgesym
