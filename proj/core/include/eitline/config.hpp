#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eitline/atom_model.hpp"
#include "eitline/experiments.hpp"

namespace eitline {

enum class FitModel { two_level, eit };
enum class FitDomain { complex_t, magnitude };

/// Fully resolved run configuration. Frequencies and rates are stored in
/// rad/s; config keys with the `_mhz` suffix mean value/2pi in MHz and are
/// converted on input. Unknown keys, unknown sections, duplicates and
/// malformed numbers are rejected with line-precise messages.
struct RunConfig {
    AtomSpec atom;
    DriveSpec drive;

    std::vector<double> delta_p_grid;    // empty when [grid] gives none
    std::vector<double> omega_c_grid;
    std::vector<double> omega_c_ladder;  // spectrum curve family; may be empty

    SweepMode mode = SweepMode::weak_probe_analytic;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string out_path;

    double evolve_t_final = 0.0;
    double evolve_step = 0.0;  // 0 = stability-bound step
    std::string evolve_initial = "ground";
    int evolve_samples = 201;

    FitModel fit_model = FitModel::two_level;
    FitDomain fit_domain = FitDomain::complex_t;

    bool gamma_rel_32_defaulted = false;
    bool gamma_deph_32_defaulted = false;
    std::string source;  // config origin, echoed into outputs
};

RunConfig parse_config_file(const std::string& path);                     // IoError, ConfigError
RunConfig parse_config_text(const std::string& text, const std::string& origin);

/// Resolved-configuration echo, one line per key, in fixed order; emitted as
/// '#' comments at the top of every output file. Defaulted gamma_rel_32 /
/// gamma_deph_32 are marked as such.
std::vector<std::string> echo_config(const RunConfig& config);

}  // namespace eitline
