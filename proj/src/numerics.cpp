#include "hedgesym/numerics.hpp"

#include "hedgesym/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace hedgesym {

void ToleranceSpec::validate() const {
    if (!(atol > 0.0) || !(rtol > 0.0)) throw ParamError("tolerances must be positive");
    if (max_iter < 10) throw ParamError("max_iter must be >= 10");
    if (max_depth <= 0) throw ParamError("max_depth must be positive");
}

double find_root_bracketed(const ScalarFn& f, double lo, double hi, const ToleranceSpec& tol) {
    tol.validate();
    if (lo > hi) std::swap(lo, hi);
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!std::isfinite(flo) || !std::isfinite(fhi)) {
        throw BracketError("non-finite function value at bracket end");
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw BracketError("root not bracketed: f(lo) and f(hi) have the same sign");
    }

    auto done = [&](double a, double b) {
        return std::abs(b - a) <= tol.rtol * std::min(std::abs(a), std::abs(b)) + tol.atol;
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(tol.max_iter);
    const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
    const double x = 0.5 * (bracket.first + bracket.second);
    if (iters >= static_cast<std::uintmax_t>(tol.max_iter) && !done(bracket.first, bracket.second) &&
        std::abs(f(x)) > tol.atol) {
        throw ConvergenceError("find_root_bracketed: no convergence after max_iter iterations");
    }
    return std::clamp(x, lo, hi);
}

namespace {

struct Panel {
    double value;
    double error;
};

// One fixed 7/15 Gauss-Kronrod panel. Boost reports the panel error on the
// reference interval [-1, 1]; it is rescaled to an absolute error here.
Panel gk15(const ScalarFn& f, double a, double b) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    return {v, err * std::abs(b - a) * 0.5};
}

// Halves the panel until its error is below `budget` (split evenly between
// the halves) or below the rounding floor of the panel value.
void refine(const ScalarFn& f, double a, double b, const Panel& p, double budget, int depth, QuadratureResult& r) {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(p.value);
    if (p.error <= std::max(budget, floor)) {
        r.value += p.value;
        r.error_estimate += p.error;
        return;
    }
    if (depth == 0) {
        r.value += p.value;
        r.error_estimate += p.error;
        r.converged = false;
        return;
    }
    const double mid = 0.5 * (a + b);
    const Panel left = gk15(f, a, mid);
    const Panel right = gk15(f, mid, b);
    refine(f, a, mid, left, 0.5 * budget, depth - 1, r);
    refine(f, mid, b, right, 0.5 * budget, depth - 1, r);
}

}  // namespace

QuadratureResult adaptive_quadrature(const ScalarFn& f, double a, double b, const ToleranceSpec& tol) {
    tol.validate();
    QuadratureResult r;
    r.converged = true;
    if (a == b) return r;
    const Panel whole = gk15(f, a, b);
    const double budget = std::max(tol.atol, tol.rtol * std::abs(whole.value));
    refine(f, a, b, whole, budget, tol.max_depth, r);
    return r;
}

double integrate(const ScalarFn& f, double a, double b, const ToleranceSpec& tol) {
    const auto r = adaptive_quadrature(f, a, b, tol);
    if (!r.converged) throw ConvergenceError("adaptive_quadrature: subdivision limit reached");
    return r.value;
}

// ---------------------------------------------------------------------------
// Dense output
// ---------------------------------------------------------------------------

void DenseTrajectory::push(double z, State x, State dx, State extra) {
    z_.push_back(z);
    x_.push_back(std::move(x));
    dx_.push_back(std::move(dx));
    extra_.push_back(std::move(extra));
}

std::size_t DenseTrajectory::segment(double z) const {
    if (z_.size() < 2) throw DomainError("dense trajectory has fewer than two nodes");
    const bool forward = z_.back() >= z_.front();
    const double lo = forward ? z_.front() : z_.back();
    const double hi = forward ? z_.back() : z_.front();
    const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
    if (z < lo - slack || z > hi + slack) {
        throw DomainError("z outside the integrated range of the trajectory");
    }
    std::size_t idx;
    if (forward) {
        auto it = std::upper_bound(z_.begin(), z_.end(), z);
        idx = static_cast<std::size_t>(std::distance(z_.begin(), it));
    } else {
        auto it = std::upper_bound(z_.begin(), z_.end(), z, std::greater<>{});
        idx = static_cast<std::size_t>(std::distance(z_.begin(), it));
    }
    if (idx == 0) idx = 1;
    if (idx >= z_.size()) idx = z_.size() - 1;
    return idx - 1;
}

// p(s) = x0 + s r2 + s (1-s) r3 + s^2 (1-s) r4 + s^2 (1-s)^2 r5 with
// r2 = x1 - x0, r3 = h dx0 - r2, r4 = r2 - h dx1 - r3; r5 = 0 is cubic Hermite.
double DenseTrajectory::value(double z, std::size_t comp) const {
    if (z_.size() == 1) return x_.front()[comp];
    const std::size_t i = segment(z);
    const double h = z_[i + 1] - z_[i];
    const double s = (z - z_[i]) / h;
    const double r2 = x_[i + 1][comp] - x_[i][comp];
    const double r3 = h * dx_[i][comp] - r2;
    const double r4 = r2 - h * dx_[i + 1][comp] - r3;
    const double r5 = extra_[i + 1].empty() ? 0.0 : extra_[i + 1][comp];
    return x_[i][comp] + s * (r2 + (1 - s) * (r3 + s * (r4 + (1 - s) * r5)));
}

double DenseTrajectory::derivative(double z, std::size_t comp) const {
    if (z_.size() == 1) return dx_.front()[comp];
    const std::size_t i = segment(z);
    const double h = z_[i + 1] - z_[i];
    const double s = (z - z_[i]) / h;
    const double r2 = x_[i + 1][comp] - x_[i][comp];
    const double r3 = h * dx_[i][comp] - r2;
    const double r4 = r2 - h * dx_[i + 1][comp] - r3;
    const double r5 = extra_[i + 1].empty() ? 0.0 : extra_[i + 1][comp];
    return (r2 + (1 - 2 * s) * r3 + s * (2 - 3 * s) * r4 + 2 * s * (1 - s) * (1 - 2 * s) * r5) / h;
}

std::string to_string(IvpStatus s) {
    switch (s) {
        case IvpStatus::Success: return "success";
        case IvpStatus::NoRealBranch: return "no-real-branch";
        case IvpStatus::StepUnderflow: return "step-underflow";
        case IvpStatus::Guard: return "guard";
    }
    return "unknown";
}

void IvpResult::throw_if_failed() const {
    switch (status) {
        case IvpStatus::Success: return;
        case IvpStatus::NoRealBranch: throw NoRealBranchError(message, last_z);
        case IvpStatus::StepUnderflow: throw StepUnderflowError(message, last_z);
        case IvpStatus::Guard: throw GuardError(message);
    }
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

/// Evaluates the full derivative vector at a stage. Returns false when the
/// stage has no real branch (the step is then retried with a smaller h).
using StageFn = std::function<bool(double z, std::span<const double> x, std::span<double> dx, int* branch)>;

struct StageFailure {
    IvpStatus status;
    std::string message;
};

using StepHook = std::function<void(const State& k1)>;

IvpResult integrate_dp45(const StageFn& stage, State x0, State dx0, int branch0, double z0, double z1,
                         const IvpOptions& opt, const StepHook& begin_step = {}) {
    opt.tol.validate();
    IvpResult res;
    const std::size_t n = x0.size();
    const double dir = z1 >= z0 ? 1.0 : -1.0;
    const double span = std::abs(z1 - z0);

    res.trajectory.push(z0, x0, dx0);
    res.last_z = z0;
    if (span == 0.0) return res;

    double h = opt.fixed_step > 0.0 ? opt.fixed_step
               : opt.initial_step > 0.0 ? opt.initial_step
                                        : span / 100.0;
    if (opt.fixed_step > 0.0) {
        const double steps = std::ceil(span / opt.fixed_step - 1e-9);
        h = span / steps;
    }

    double z = z0;
    State x = std::move(x0);
    State k1 = std::move(dx0);
    int branch = branch0;
    std::vector<State> k(6, State(n));
    State xs(n), xnew(n), k7(n);

    auto at = [&](std::initializer_list<std::pair<double, const State*>> terms, State& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = x[i];
            for (const auto& [c, kk] : terms) acc += dir * h * c * (*kk)[i];
            out[i] = acc;
        }
    };

    std::size_t steps = 0;
    while (dir * (z1 - z) > 0.0) {
        if (++steps > opt.max_steps) {
            res.status = IvpStatus::StepUnderflow;
            res.message = "maximum number of steps exceeded";
            return res;
        }
        const double remaining = std::abs(z1 - z);
        bool last = false;
        if (h >= remaining * (1.0 - 1e-12)) {
            h = remaining;
            last = true;
        }
        const double underflow = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z));
        if (h < underflow) {
            res.status = res.status == IvpStatus::NoRealBranch ? IvpStatus::NoRealBranch
                                                               : IvpStatus::StepUnderflow;
            if (res.message.empty()) res.message = "step size underflow";
            return res;
        }

        int stage_branch = branch;
        bool stage_ok = true;
        if (begin_step) begin_step(k1);
        try {
            State& K2 = k[0];
            State& K3 = k[1];
            State& K4 = k[2];
            State& K5 = k[3];
            State& K6 = k[4];
            at({{a21, &k1}}, xs);
            stage_ok = stage(z + dir * c2 * h, xs, K2, &stage_branch);
            if (stage_ok) {
                at({{a31, &k1}, {a32, &K2}}, xs);
                stage_ok = stage(z + dir * c3 * h, xs, K3, &stage_branch);
            }
            if (stage_ok) {
                at({{a41, &k1}, {a42, &K2}, {a43, &K3}}, xs);
                stage_ok = stage(z + dir * c4 * h, xs, K4, &stage_branch);
            }
            if (stage_ok) {
                at({{a51, &k1}, {a52, &K2}, {a53, &K3}, {a54, &K4}}, xs);
                stage_ok = stage(z + dir * c5 * h, xs, K5, &stage_branch);
            }
            if (stage_ok) {
                at({{a61, &k1}, {a62, &K2}, {a63, &K3}, {a64, &K4}, {a65, &K5}}, xs);
                stage_ok = stage(z + dir * h, xs, K6, &stage_branch);
            }
            if (stage_ok) {
                at({{b1, &k1}, {b3, &K3}, {b4, &K4}, {b5, &K5}, {b6, &K6}}, xnew);
                stage_ok = stage(z + dir * h, xnew, k7, &stage_branch);
            }
        } catch (const GuardError& e) {
            res.status = IvpStatus::Guard;
            res.message = e.what();
            return res;
        }

        if (!stage_ok) {
            if (opt.fixed_step > 0.0) {
                res.status = IvpStatus::NoRealBranch;
                res.message = "no real branch at a stage point";
                return res;
            }
            res.status = IvpStatus::NoRealBranch;
            res.message = "no real branch beyond z = " + std::to_string(z);
            h *= 0.25;
            ++res.rejected_steps;
            continue;
        }
        res.status = IvpStatus::Success;
        res.message.clear();

        double err = 0.0;
        if (opt.fixed_step <= 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k[1][i] + e4 * k[2][i] + e5 * k[3][i] +
                                      e6 * k[4][i] + e7 * k7[i]);
                const double sc =
                    opt.tol.atol + opt.tol.rtol * std::max(std::abs(x[i]), std::abs(xnew[i]));
                err = std::max(err, std::abs(e) / sc);
            }
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            State extra(n);
            for (std::size_t i = 0; i < n; ++i) {
                extra[i] = dir * h * (d1 * k1[i] + d3 * k[1][i] + d4 * k[2][i] + d5 * k[3][i] + d6 * k[4][i] +
                                      d7 * k7[i]);
            }
            z = last ? z1 : z + dir * h;
            x = xnew;
            k1 = k7;
            if (stage_branch != branch) {
                res.branch_log.push_back({z, branch, stage_branch});
                branch = stage_branch;
            }
            res.trajectory.push(z, x, k1, std::move(extra));
            res.last_z = z;
            ++res.accepted_steps;
            if (opt.fixed_step <= 0.0) {
                const double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
                h *= std::clamp(fac, 0.2, 5.0);
            }
        } else {
            ++res.rejected_steps;
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 0.9);
        }
    }
    return res;
}

}  // namespace

IvpResult solve_ivp(const ExplicitRhs& f, State x0, double z0, double z1, const IvpOptions& opt) {
    if (x0.empty()) throw ParamError("solve_ivp: empty initial state");
    State dx0(x0.size());
    f(z0, x0, dx0);
    StageFn stage = [&](double z, std::span<const double> x, std::span<double> dx, int*) {
        f(z, x, dx);
        for (double v : dx) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    };
    return integrate_dp45(stage, std::move(x0), std::move(dx0), 0, z0, z1, opt);
}

SlopeChoice resolve_slope_bracketed(const ImplicitResidual& F, double z, std::span<const double> x,
                                    double previous, const ToleranceSpec& tol) {
    auto safe = [&](double s) -> double {
        try {
            const double v = F(z, x, s);
            return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
        } catch (const DomainError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };

    constexpr int kSubintervals = 32;
    double width = 4.0 * std::abs(previous) + 1.0;
    for (int expansion = 0; expansion <= 8; ++expansion, width *= 2.0) {
        const double lo = previous - 0.5 * width;
        const double step = width / kSubintervals;
        std::optional<double> best;
        double a = lo;
        double fa = safe(a);
        for (int i = 1; i <= kSubintervals; ++i) {
            const double b = lo + i * step;
            const double fb = safe(b);
            if (!std::isnan(fa) && !std::isnan(fb)) {
                std::optional<double> root;
                if (fa == 0.0) {
                    root = a;
                } else if ((fa < 0.0) != (fb < 0.0) || fb == 0.0) {
                    root = find_root_bracketed([&](double s) { return F(z, x, s); }, a, b, tol);
                }
                if (root && (!best || std::abs(*root - previous) < std::abs(*best - previous))) {
                    best = root;
                }
            }
            a = b;
            fa = fb;
        }
        if (best) return {*best, 0};
    }
    throw NoRealBranchError("no real slope found near the previous slope", z);
}

IvpResult solve_ivp(const ImplicitSystem& sys, State x0, double initial_slope, double z0, double z1,
                    const IvpOptions& opt) {
    if (x0.empty()) throw ParamError("solve_ivp: empty initial state");
    if (!sys.residual && !sys.resolver) throw ParamError("solve_ivp: implicit system needs a residual or resolver");

    const ToleranceSpec stage_tol{1e-15, 1e-14, 200, 50};
    double previous = initial_slope;

    auto resolve = [&](double z, std::span<const double> x, double prev) -> SlopeChoice {
        if (sys.resolver) return sys.resolver(z, x, prev);
        return resolve_slope_bracketed(sys.residual, z, x, prev, stage_tol);
    };
    auto fill = [&](double z, std::span<const double> x, double slope, std::span<double> dx) {
        dx[0] = slope;
        if (x.size() > 1) {
            if (!sys.aux) throw ParamError("solve_ivp: auxiliary components need an AuxRhs");
            sys.aux(z, x, slope, dx.subspan(1));
        }
    };

    // The initial slope is polished by the resolver so the first node is consistent.
    SlopeChoice first = resolve(z0, x0, initial_slope);
    State dx0(x0.size());
    fill(z0, x0, first.slope, dx0);
    previous = first.slope;

    StageFn stage = [&](double z, std::span<const double> x, std::span<double> dx, int* branch) {
        try {
            const SlopeChoice c = resolve(z, x, previous);
            previous = c.slope;
            *branch = c.branch;
            fill(z, x, c.slope, dx);
        } catch (const NoRealBranchError&) {
            return false;
        } catch (const DomainError&) {
            return false;
        }
        return true;
    };
    // Every attempt, including retries after a rejection, starts from the node slope.
    StepHook reset = [&](const State& k1) { previous = k1[0]; };
    return integrate_dp45(stage, std::move(x0), std::move(dx0), first.branch, z0, z1, opt, reset);
}

}  // namespace hedgesym
