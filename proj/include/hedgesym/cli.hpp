#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: model, reduce, closed-form, verify, symmetry, figures.
 *
 * Exit codes: 0 success, 1 internal error, 2 parameter or admissibility error,
 * 3 integration failure, 4 guard violation, 5 residual above the threshold.
 */

#include "hedgesym/model_core.hpp"
#include "hedgesym/numerics.hpp"
#include "hedgesym/reductions.hpp"
#include "hedgesym/surface.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hedgesym::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kParam = 2, kIntegration = 3, kGuard = 4, kResidual = 5 };

struct RunConfig {
    std::string subcommand;

    // model selection
    std::string model;  // general, frey, haupt, sipa; empty: inferred
    std::string g;      // exp, power, fracpow, table
    std::optional<double> c1, c2, k, rho;
    std::string table;  // alpha,g CSV for g = table

    // case and group parameters
    std::string case_id;
    std::optional<double> sigma, sigma2, phi, phi_deg, x;
    int eps = 1;

    // reduce
    double z0 = 0.0, z1 = 1.0, y0 = 1.0, w0 = 0.0;
    std::string branch = "plus";
    std::optional<double> slope0;
    std::size_t samples = 0;

    // closed-form / verify
    std::string family = "power";  // power, excluded, implicit
    double d1 = 1.0, d2 = 0.0;
    std::string surface;
    std::optional<double> constant;
    double threshold = 1e-8;

    // grid
    double s_min = 0.1, s_max = 100.0, t_min = 0.1, t_max = 1.0;
    std::size_t n_s = 100, n_t = 50;
    bool log_s = false;

    // symmetry / figures
    std::string basis = "L4";
    std::string format = "text";
    bool optimal = false;
    std::string figure;

    // outputs
    std::string out, sidecar, json;

    // tolerance overrides
    std::optional<double> atol, rtol;

    /// Checks cross-field consistency. @throws ParamError.
    void validate() const;

    double sigma_value() const;
    std::optional<double> phi_value() const;
    SampleGrid grid() const;
    ToleranceSpec tolerances(const ToleranceSpec& base) const;
};

/// Reaction function from --g and its parameters (unchecked; violations kept).
ReactionFunction make_reaction(const RunConfig& c);

/// Case description from --case and the group parameters.
ReductionCase make_case(const RunConfig& c);

/// Inserts the flags of a `--config file.json` object right after the
/// subcommand so that explicit flags, which come later, take precedence.
/// Keys are flag names without dashes; `true` booleans become bare flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hedgesym::cli
