#include "hedgesym/cli.hpp"

#include "hedgesym/errors.hpp"
#include "hedgesym/h4_implicit.hpp"
#include "hedgesym/io.hpp"
#include "hedgesym/lie_algebra.hpp"
#include "hedgesym/pde_ops.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <variant>

namespace hedgesym::cli {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ParamError("cannot open " + path + " for writing");
    write(os);
    if (!os) throw Error("write to " + path + " failed");
}

void emit_json(const std::string& path, std::ostream& fallback, const json& j) {
    emit(path, fallback, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

json tolerances_json(const ToleranceSpec& t) {
    return {{"atol", t.atol}, {"rtol", t.rtol}, {"max_iter", t.max_iter}, {"max_depth", t.max_depth}};
}

json g_json(const ReactionFunction& g) {
    json p = std::visit(overloaded{
                            [](const Exponential& f) { return json{{"c1", f.c1}, {"c2", f.c2}}; },
                            [](const Power& f) { return json{{"c1", f.c1}, {"c2", f.c2}}; },
                            [](const FractionalPower& f) {
                                return json{{"c1", f.c1}, {"c2", f.c2}, {"k", f.k}, {"rho", f.rho}};
                            },
                            [](const Tabulated& t) { return json{{"samples", t.alpha().size()}}; },
                        },
                        g.family());
    return {{"family", g.name()}, {"params", p}};
}

json case_json(const ReductionCase& rc) {
    json j{{"id", to_string(rc.id)}, {"sigma", rc.sigma}, {"phi", rc.phi}, {"x", rc.x}, {"eps", rc.eps}};
    if (is_general_case(rc.id)) {
        j["rho"] = rc.rho;
        j["g"] = g_json(*rc.g);
    } else {
        j["c1"] = rc.c1;
    }
    return j;
}

json sidecar(const ReductionCase& rc, const json& branch_log, const ToleranceSpec& tol) {
    return {{"case", to_string(rc.id)},
            {"params", derived_params(rc).to_json()},
            {"branch_log", branch_log},
            {"tolerances", tolerances_json(tol)},
            {"inputs", case_json(rc)}};
}

ReactionFunction checked_reaction(const RunConfig& c) {
    ReactionFunction g = make_reaction(c);
    if (!g.admissible()) throw AdmissibilityError("inadmissible g", g.violations());
    return g;
}

// ---------------------------------------------------------------------------

int cmd_model(const RunConfig& c, std::ostream& out) {
    const ReactionFunction g = checked_reaction(c);
    const UtilitySpec u(g);
    const auto alphas = duality_samples(g, c.samples ? c.samples : 200);
    double worst = 0.0;
    json rows = json::array();
    for (double a : alphas) {
        const double e = duality_error(u, a);
        worst = std::max(worst, e);
        rows.push_back({{"alpha", a}, {"g", eval_g(g, a)}, {"U", utility_value(u, 1.0 / eval_g(g, a))}, {"error", e}});
    }
    json report = g_json(g);
    report["utility"] = u.formula();
    report["admissible"] = true;
    report["violations"] = json::array();
    report["duality"] = {{"samples", alphas.size()}, {"max_error", worst}, {"table", rows}};

    if (c.format == "json") {
        out << report.dump(2) << '\n';
    } else {
        out << "g: " << g.name() << ' ' << report["params"].dump() << '\n';
        out << "utility: " << u.formula() << '\n';
        out << "admissible: yes\n";
        out << "duality: max |U(1/g(alpha)) - (1 - alpha)| = " << io::format_double(worst) << " over "
            << alphas.size() << " samples\n";
        out << "alpha,g,U(1/g),1-alpha\n";
        const std::size_t stride = std::max<std::size_t>(1, alphas.size() / 10);
        for (std::size_t i = 0; i < alphas.size(); i += stride) {
            const auto& r = rows[i];
            out << io::format_double(r["alpha"].get<double>()) << ',' << io::format_double(r["g"].get<double>())
                << ',' << io::format_double(r["U"].get<double>()) << ','
                << io::format_double(1.0 - r["alpha"].get<double>()) << '\n';
        }
    }
    if (!c.json.empty()) emit_json(c.json, out, report);
    return kOk;
}

int cmd_reduce(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const ReductionCase rc = make_case(c);
    ReductionOptions opt;
    opt.ivp.tol = c.tolerances(ToleranceSpec{1e-12, 1e-10, 200, 50});
    opt.branch = parse_branch(c.branch);
    opt.initial_slope = c.slope0;
    opt.w0 = c.w0;
    const Trajectory tr = solve_reduction(rc, c.z0, c.z1, c.y0, opt);

    std::vector<std::vector<double>> rows;
    const auto nodes = (c.samples >= 2 && tr.ivp().trajectory.size() >= 2) ? tr.resample(c.samples) : tr.table();
    for (const auto& r : nodes) rows.push_back({r[0], r[1], r[2]});
    const std::vector<std::string> header{"z", "Y", "W"};
    emit(c.out, out, [&](std::ostream& os) { io::write_csv(os, header, rows); });

    if (!c.sidecar.empty()) {
        json log = json::array();
        for (const auto& b : tr.ivp().branch_log) log.push_back({{"z", b.z}, {"from", b.from}, {"to", b.to}});
        json j = sidecar(rc, log, opt.ivp.tol);
        j["status"] = to_string(tr.ivp().status);
        j["last_z"] = tr.ivp().last_z;
        j["z0"] = c.z0;
        j["z1"] = c.z1;
        j["y0"] = c.y0;
        j["branch"] = c.slope0 ? "explicit-slope" : c.branch;
        j["accepted_steps"] = tr.ivp().accepted_steps;
        j["rejected_steps"] = tr.ivp().rejected_steps;
        emit_json(c.sidecar, out, j);
    }
    if (!tr.ok()) {
        err << "integration stopped (" << to_string(tr.ivp().status) << "): " << tr.ivp().message
            << "; last valid z = " << io::format_double(tr.ivp().last_z) << '\n';
        return kIntegration;
    }
    return kOk;
}

struct BuiltSurface {
    SolutionSurface surface;
    json meta;
};

BuiltSurface build_surface(const RunConfig& c) {
    const ReductionCase rc = make_case(c);
    json meta{{"case", to_string(rc.id)}, {"family", c.family}, {"params", derived_params(rc).to_json()},
              {"d1", c.d1}, {"d2", c.d2}};
    if (c.family == "power") {
        const auto s = build_power_option(rc, parse_branch(c.branch), c.d1, c.d2);
        meta["k"] = *s.k;
        meta["label"] = s.surface.label();
        return {s.surface, meta};
    }
    if (c.family == "excluded") {
        const auto s = excluded_family(rc, c.d1, c.d2);
        meta["label"] = s.surface.label();
        return {s.surface, meta};
    }
    if (c.family == "implicit") {
        if (rc.id != CaseId::S_H4) throw ParamError("the implicit family belongs to case s_h4");
        const H4Implicit h(H4Constants::from(derived_params(rc)), c.d1);
        meta["mode"] = to_string(h.mode());
        meta["validation_error"] = h.validation_error();
        meta["segment_lower"] = h.segment_lower();
        meta["w0"] = c.w0;
        return {invert_and_reconstruct(h, c.grid(), c.w0), meta};
    }
    throw ParamError("unknown family '" + c.family + "' (expected power, excluded or implicit)");
}

GridSurface as_grid(const SolutionSurface& s, const SampleGrid& grid) {
    if (const auto* g = std::get_if<GridSurface>(&s)) return *g;
    return sample(std::get<ClosedForm>(s), grid);
}

int cmd_closed_form(const RunConfig& c, std::ostream& out) {
    const BuiltSurface b = build_surface(c);
    const GridSurface g = as_grid(b.surface, c.grid());
    emit(c.out, out, [&](std::ostream& os) { g.write_csv(os); });
    if (!c.sidecar.empty()) emit_json(c.sidecar, out, b.meta);
    return kOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::optional<SolutionSurface> surface;
    json source;
    if (!c.surface.empty()) {
        surface = GridSurface::read_csv(std::filesystem::path(c.surface));
        source = {{"surface", c.surface}};
    } else if (c.constant) {
        PowerExpSeries s;
        s.constant = *c.constant;
        surface = ClosedForm("constant", s);
        source = {{"constant", *c.constant}};
    } else {
        BuiltSurface b = build_surface(c);
        surface = std::move(b.surface);
        source = b.meta;
    }

    std::string model = c.model;
    if (model.empty()) {
        if (c.case_id.empty()) throw ParamError("--model is required");
        model = is_general_case(parse_case(c.case_id)) ? "general" : "haupt";
    }

    const SampleGrid grid = c.grid();
    ResidualReport report;
    if (model == "general") {
        const ReactionFunction g = checked_reaction(c);
        if (!c.rho) throw ParamError("--rho is required");
        report = evaluate_general(g, ModelParams(c.sigma_value(), *c.rho), *surface, grid);
    } else {
        SpecialParams p{model == "frey" ? SpecialModel::Frey : model == "haupt" ? SpecialModel::Haupt : SpecialModel::Sipa,
                        c.sigma_value(), 0.0, c.rho.value_or(0.0), c.k.value_or(0.0)};
        if (!c.c1) throw ParamError("--c1 is required");
        p.c1 = *c.c1;
        p.validate();
        report = evaluate_special(p, *surface, grid);
    }

    json j = report.to_json();
    j["model"] = model;
    j["threshold"] = c.threshold;
    j["source"] = source;
    const bool guard_ok = report.guard_violations == 0;
    const bool residual_ok = report.max_residual < c.threshold;
    j["passed"] = guard_ok && residual_ok;
    emit_json(c.out, out, j);

    if (!guard_ok) {
        err << "guard violations: " << report.guard_violations << " of " << report.n_interior
            << " interior points\n";
        return kGuard;
    }
    if (!residual_ok) {
        err << "max residual " << io::format_double(report.max_residual) << " is not below the threshold "
            << io::format_double(c.threshold) << '\n';
        return kResidual;
    }
    return kOk;
}

int cmd_symmetry(const RunConfig& c, std::ostream& out) {
    const Basis b = parse_basis(c.basis);
    const StructureTable table = structure_constants(b);
    const auto gens = generators(b);
    if (c.format == "json") {
        json j{{"basis", to_string(b)}};
        json names = json::array();
        for (const auto& g : gens) names.push_back(to_string(g));
        j["generators"] = names;
        j["structure_constants"] = table.to_json();
        j["jacobi_defect"] = boost::rational_cast<double>(table.jacobi_defect());
        if (c.optimal) {
            json sys = json::array();
            for (const auto& e : optimal_system(b)) {
                sys.push_back({{"id", e.id}, {"dimension", e.dimension}, {"generators", e.generators}});
            }
            j["optimal_system"] = sys;
        }
        out << j.dump(2) << '\n';
        return kOk;
    }
    for (std::size_t i = 0; i < gens.size(); ++i) out << 'V' << i + 1 << " = " << to_string(gens[i]) << '\n';
    out << table.to_text();
    const Rational defect = table.jacobi_defect();
    out << "jacobi defect: " << defect.numerator();
    if (defect.denominator() != 1) out << '/' << defect.denominator();
    out << '\n';
    if (c.optimal) {
        out << "optimal system:\n";
        for (const auto& e : optimal_system(b)) {
            out << "  " << e.id << ": ";
            for (std::size_t i = 0; i < e.generators.size(); ++i) out << (i ? ", " : "") << e.generators[i];
            out << '\n';
        }
    }
    return kOk;
}

int cmd_figures(const RunConfig& c, std::ostream& out) {
    if (c.figure == "fig1-left" || c.figure == "fig1-right") {
        ReductionCase rc;
        rc.id = CaseId::S_H2;
        rc.c1 = 2.1;
        rc.phi = 1.17;
        rc.sigma = std::sqrt(0.41036);
        const Branch br = c.figure == "fig1-left" ? Branch::Minus : Branch::Plus;
        const auto s = build_power_option(rc, br, 1.0, 0.0);
        const GridSurface g = sample(s.surface, SampleGrid::uniform(0.1, 100.0, 100, 0.1, 1.0, 50));
        emit(c.out, out, [&](std::ostream& os) { g.write_csv(os); });
        if (!c.sidecar.empty()) {
            json j = sidecar(rc, json::array(), ToleranceSpec{});
            j["figure"] = c.figure;
            j["k"] = *s.k;
            j["d1"] = 1.0;
            j["d2"] = 0.0;
            emit_json(c.sidecar, out, j);
        }
        return kOk;
    }
    if (c.figure == "fig2") {
        ReductionCase rc;
        rc.id = CaseId::S_H4;
        rc.c1 = 10.0;
        rc.eps = 1;
        rc.phi = std::numbers::pi / 4.0;
        rc.sigma = std::sqrt(0.02);
        const H4Implicit h(H4Constants::from(derived_params(rc)), 0.0);
        const auto curve = h4_curve(h, 0.4, 3.4, 30.0, 200);
        std::vector<std::vector<double>> rows;
        for (const auto& p : curve) rows.push_back({p[0], p[1]});
        const std::vector<std::string> header{"z", "Y"};
        emit(c.out, out, [&](std::ostream& os) { io::write_csv(os, header, rows); });
        if (!c.sidecar.empty()) {
            json j = sidecar(rc, json::array(), ToleranceSpec{1e-300, 1e-15, 400, 50});
            j["figure"] = c.figure;
            j["d1"] = 0.0;
            j["mode"] = to_string(h.mode());
            j["validation_error"] = h.validation_error();
            j["segment_lower"] = h.segment_lower();
            emit_json(c.sidecar, out, j);
        }
        return kOk;
    }
    throw ParamError("unknown figure '" + c.figure + "' (expected fig1-left, fig1-right or fig2)");
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* s, RunConfig& c) {
    s->add_option("--model", c.model, "general, frey, haupt or sipa");
    s->add_option("--g", c.g, "reaction function: exp, power, fracpow or table");
    s->add_option("--c1", c.c1);
    s->add_option("--c2", c.c2);
    s->add_option("--k", c.k);
    s->add_option("--rho", c.rho);
    s->add_option("--table", c.table, "alpha,g CSV for --g table");
    s->add_option("--case", c.case_id, "g_h2, g_h3, s_h2, s_h3 or s_h4");
    s->add_option("--sigma", c.sigma);
    s->add_option("--sigma2", c.sigma2, "sigma squared");
    s->add_option("--phi", c.phi, "radians");
    s->add_option("--phi-deg", c.phi_deg, "degrees");
    s->add_option("--x", c.x);
    s->add_option("--eps", c.eps);
    s->add_option("--z0", c.z0);
    s->add_option("--z1", c.z1);
    s->add_option("--y0", c.y0);
    s->add_option("--w0", c.w0);
    s->add_option("--branch", c.branch, "plus or minus");
    s->add_option("--slope0", c.slope0, "initial Y' (overrides --branch)");
    s->add_option("--samples", c.samples);
    s->add_option("--family", c.family, "power, excluded or implicit");
    s->add_option("--d1", c.d1);
    s->add_option("--d2", c.d2);
    s->add_option("--surface", c.surface, "S,t,u CSV");
    s->add_option("--constant", c.constant, "constant surface u = value");
    s->add_option("--threshold", c.threshold);
    s->add_option("--s-min", c.s_min);
    s->add_option("--s-max", c.s_max);
    s->add_option("--t-min", c.t_min);
    s->add_option("--t-max", c.t_max);
    s->add_option("--n-s", c.n_s);
    s->add_option("--n-t", c.n_t);
    s->add_flag("--log-s", c.log_s, "S uniform in ln S");
    s->add_option("--basis", c.basis, "L3 or L4");
    s->add_option("--format", c.format, "text or json");
    s->add_flag("--optimal", c.optimal, "list the optimal system");
    s->add_option("--out", c.out);
    s->add_option("--sidecar", c.sidecar);
    s->add_option("--json", c.json);
    s->add_option("--atol", c.atol);
    s->add_option("--rtol", c.rtol);
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.subcommand == "model") return cmd_model(c, out);
    if (c.subcommand == "reduce") return cmd_reduce(c, out, err);
    if (c.subcommand == "closed-form") return cmd_closed_form(c, out);
    if (c.subcommand == "verify") return cmd_verify(c, out, err);
    if (c.subcommand == "symmetry") return cmd_symmetry(c, out);
    if (c.subcommand == "figures") return cmd_figures(c, out);
    throw ParamError("unknown subcommand");
}

}  // namespace

int run(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Symmetry reductions and invariant solutions of illiquid-market hedging PDEs", "hedgesym"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::vector<std::pair<std::string, std::string>> subs{
        {"model", "reaction function, utility and duality check"},
        {"reduce", "integrate a reduced ODE; writes z,Y,W"},
        {"closed-form", "sample an invariant solution; writes S,t,u"},
        {"verify", "PDE residual report of a surface"},
        {"symmetry", "structure constants and optimal systems"},
        {"figures", "reproduce fig1-left, fig1-right or fig2"},
    };
    for (const auto& [name, help] : subs) {
        CLI::App* s = app.add_subcommand(name, help);
        s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        s->add_option("--config", "JSON file mirroring the flags; explicit flags win");
        add_common(s, c);
        if (name == "figures") s->add_option("id,--id", c.figure, "fig1-left, fig1-right or fig2")->required();
        s->callback([&c, name = name] { c.subcommand = name; });
    }

    try {
        std::vector<std::string> args = expand_config(raw);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kParam;
    } catch (const ParamError& e) {
        err << "error: " << e.what() << '\n';
        return kParam;
    }

    try {
        c.validate();
        return dispatch(c, out, err);
    } catch (const AdmissibilityError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& v : e.violations()) err << "  " << v << '\n';
        return kParam;
    } catch (const ComplexRootsError& e) {
        err << "error: " << e.what() << '\n';
        return kParam;
    } catch (const ParamError& e) {
        err << "error: " << e.what() << '\n';
        return kParam;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kParam;
    } catch (const GridError& e) {
        err << "error: " << e.what() << '\n';
        return kParam;
    } catch (const NoRealBranchError& e) {
        err << "error: " << e.what() << "; last valid z = " << io::format_double(e.z()) << '\n';
        return kIntegration;
    } catch (const StepUnderflowError& e) {
        err << "error: " << e.what() << "; last valid z = " << io::format_double(e.z()) << '\n';
        return kIntegration;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kIntegration;
    } catch (const BracketError& e) {
        err << "error: " << e.what() << '\n';
        return kIntegration;
    } catch (const GuardError& e) {
        err << "error: " << e.what() << " (" << e.violations() << " of " << e.n_interior() << ")\n";
        return kGuard;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace hedgesym::cli
