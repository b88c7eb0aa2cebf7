#include "hedgesym/cli.hpp"

#include "hedgesym/errors.hpp"
#include "hedgesym/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace hedgesym::cli {

namespace {

double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw ParamError(std::string("--") + flag + " is required");
    return *v;
}

bool is_special(const std::string& m) { return m == "frey" || m == "haupt" || m == "sipa"; }

}  // namespace

void RunConfig::validate() const {
    if (!model.empty() && model != "general" && !is_special(model)) {
        throw ParamError("unknown model '" + model + "' (expected general, frey, haupt or sipa)");
    }
    if (!g.empty() && g != "exp" && g != "power" && g != "fracpow" && g != "table") {
        throw ParamError("unknown g '" + g + "' (expected exp, power, fracpow or table)");
    }
    if (sigma && sigma2) throw ParamError("give --sigma or --sigma2, not both");
    if (phi && phi_deg) throw ParamError("give --phi or --phi-deg, not both");
    if (!case_id.empty()) {
        const CaseId id = parse_case(case_id);
        if (is_general_case(id)) {
            if (!model.empty() && model != "general") throw ParamError("case " + case_id + " requires model general");
        } else if (!model.empty() && model != "haupt") {
            throw ParamError("case " + case_id + " requires model haupt");
        }
    }
    if (n_s < 5 || n_t < 5) throw ParamError("grid counts must be >= 5");
    if (!(s_min > 0.0) || !(s_max > s_min)) throw ParamError("0 < s-min < s-max required");
    if (!(t_max > t_min)) throw ParamError("t-min < t-max required");
    if (!(threshold > 0.0)) throw ParamError("threshold must be positive");
}

double RunConfig::sigma_value() const {
    if (sigma2) {
        if (!(*sigma2 > 0.0)) throw ParamError("sigma2 > 0 required");
        return std::sqrt(*sigma2);
    }
    return need(sigma, "sigma");
}

std::optional<double> RunConfig::phi_value() const {
    if (phi_deg) return *phi_deg * std::numbers::pi / 180.0;
    return phi;
}

SampleGrid RunConfig::grid() const {
    return log_s ? SampleGrid::log_uniform(s_min, s_max, n_s, t_min, t_max, n_t)
                 : SampleGrid::uniform(s_min, s_max, n_s, t_min, t_max, n_t);
}

ToleranceSpec RunConfig::tolerances(const ToleranceSpec& base) const {
    ToleranceSpec t = base;
    if (atol) t.atol = *atol;
    if (rtol) t.rtol = *rtol;
    t.validate();
    return t;
}

ReactionFunction make_reaction(const RunConfig& c) {
    if (c.g == "exp") return ReactionFunction::unchecked(Exponential{need(c.c1, "c1"), need(c.c2, "c2")});
    if (c.g == "power") return ReactionFunction::unchecked(Power{need(c.c1, "c1"), need(c.c2, "c2")});
    if (c.g == "fracpow") {
        return ReactionFunction::unchecked(
            FractionalPower{need(c.c1, "c1"), need(c.c2, "c2"), need(c.k, "k"), need(c.rho, "rho")});
    }
    if (c.g == "table") {
        if (c.table.empty()) throw ParamError("--table is required for g = table");
        return ReactionFunction::unchecked(load_tabulated_csv(c.table));
    }
    throw ParamError("--g is required");
}

ReductionCase make_case(const RunConfig& c) {
    if (c.case_id.empty()) throw ParamError("--case is required");
    ReductionCase rc;
    rc.id = parse_case(c.case_id);
    rc.sigma = c.sigma_value();
    rc.eps = c.eps;
    if (const auto p = c.phi_value()) rc.phi = *p;
    else if (rc.id != CaseId::G_H2) throw ParamError("--phi is required for case " + c.case_id);
    if (rc.id == CaseId::S_H3) rc.x = need(c.x, "x");
    if (is_general_case(rc.id)) {
        rc.rho = need(c.rho, "rho");
        rc.g = make_reaction(c);
    } else {
        rc.c1 = need(c.c1, "c1");
    }
    rc.validate();
    return rc;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ParamError("--config needs a file");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            out.push_back(args[i]);
        }
    }
    if (path.empty()) return out;

    std::ifstream is(path);
    if (!is) throw ParamError("cannot open config file " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParamError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ParamError("config file must hold a JSON object");

    std::vector<std::string> flags;
    for (const auto& [key, v] : j.items()) {
        const std::string flag = "--" + key;
        if (v.is_boolean()) {
            if (v.get<bool>()) flags.push_back(flag);
        } else if (v.is_number_float()) {
            flags.push_back(flag);
            flags.push_back(io::format_double(v.get<double>()));
        } else if (v.is_number()) {
            flags.push_back(flag);
            flags.push_back(v.dump());
        } else if (v.is_string()) {
            flags.push_back(flag);
            flags.push_back(v.get<std::string>());
        } else {
            throw ParamError("config key '" + key + "' must be a scalar");
        }
    }
    // Subcommand first (if present), then the file's flags, then the explicit ones.
    std::size_t pos = (!out.empty() && out.front().rfind("-", 0) != 0) ? 1 : 0;
    out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), flags.begin(), flags.end());
    return out;
}

}  // namespace hedgesym::cli
