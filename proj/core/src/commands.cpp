#include "eitline/commands.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "eitline/errors.hpp"
#include "eitline/scattering.hpp"
#include "eitline/solver.hpp"

namespace eitline {

namespace {

constexpr double rad_to_hz = 1.0 / two_pi;

// T may exceed 1 by floating-point epsilon; clamp at emission only.
double clamp_power(double t_power) { return std::min(t_power, 1.0); }

void write_echo(CsvWriter& w, const RunConfig& config) {
    for (const std::string& line : echo_config(config)) {
        w.comment(line);
    }
}

void require_grid(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) {
        throw ConfigError(std::string("missing [grid] definition for ") + what);
    }
}

void write_sweep_rows(CsvWriter& w, const SweepResult& sweep) {
    for (const SweepPoint& p : sweep.points) {
        if (!p.ok) {
            w.comment("error at delta_p_over_2pi_hz = " + format_g12(p.axis1 * rad_to_hz) +
                      ": " + p.error);
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const std::array<double, 4> row = {
            p.axis1 * rad_to_hz,
            p.ok ? p.value.t.real() : nan,
            p.ok ? p.value.t.imag() : nan,
            p.ok ? clamp_power(p.value.T) : nan,
        };
        w.row(row);
    }
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

void cmd_spectrum(const RunConfig& config, std::ostream& csv) {
    require_grid(config.delta_p_grid, "delta_p (spectrum)");

    CsvWriter w(csv);
    write_echo(w, config);
    constexpr std::array<std::string_view, 4> cols = {"delta_p_over_2pi_hz", "re_t", "im_t",
                                                      "T"};
    w.columns(cols);

    std::vector<double> ladder = config.omega_c_ladder;
    if (ladder.empty()) {
        ladder.push_back(config.drive.omega_c_rabi);
    }
    for (double omega_c : ladder) {
        DriveSpec drive = config.drive;
        drive.omega_c_rabi = omega_c;
        const SweepResult sweep =
            sweep_probe(config.atom, drive, config.delta_p_grid, config.mode, config.workers);
        w.comment("curve: omega_c_over_2pi_hz = " + format_g12(omega_c * rad_to_hz));
        write_sweep_rows(w, sweep);
    }
}

void cmd_map(const RunConfig& config, std::ostream& csv) {
    require_grid(config.delta_p_grid, "delta_p (map)");
    require_grid(config.omega_c_grid, "omega_c (map)");

    const SweepResult sweep = sweep_map(config.atom, config.drive, config.delta_p_grid,
                                        config.omega_c_grid, config.mode, config.workers);

    CsvWriter w(csv);
    write_echo(w, config);
    constexpr std::array<std::string_view, 3> cols = {"omega_c_over_2pi_hz",
                                                      "delta_p_over_2pi_hz", "T"};
    w.columns(cols);
    for (const SweepPoint& p : sweep.points) {
        if (!p.ok) {
            w.comment("error at omega_c_over_2pi_hz = " + format_g12(p.axis2 * rad_to_hz) +
                      ", delta_p_over_2pi_hz = " + format_g12(p.axis1 * rad_to_hz) + ": " +
                      p.error);
        }
        const std::array<double, 3> row = {
            p.axis2 * rad_to_hz, p.axis1 * rad_to_hz,
            p.ok ? clamp_power(p.value.T) : std::numeric_limits<double>::quiet_NaN()};
        w.row(row);
    }
}

void cmd_extinction(const RunConfig& config, std::ostream& csv, std::ostream& summary) {
    require_grid(config.omega_c_grid, "omega_c (extinction)");

    const SweepResult sweep = extinction_curve(config.atom, config.omega_c_grid, config.mode,
                                               config.drive, config.workers);
    const double c = contrast(sweep);

    CsvWriter w(csv);
    write_echo(w, config);
    constexpr std::array<std::string_view, 3> cols = {"omega_c_over_2pi_hz", "T", "T_ideal"};
    w.columns(cols);
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
        const SweepPoint& p = sweep.points[i];
        if (!p.ok) {
            w.comment("error at omega_c_over_2pi_hz = " + format_g12(p.axis1 * rad_to_hz) +
                      ": " + p.error);
        }
        const std::array<double, 3> row = {
            p.axis1 * rad_to_hz, p.ok ? clamp_power(p.value.T) : std::numeric_limits<double>::quiet_NaN(),
            sweep.ideal_T[i]};
        w.row(row);
    }
    w.comment("contrast = " + format_g12(c));
    summary << "contrast = " << format_g12(c) << "\n";
}

void cmd_evolve(const RunConfig& config, std::ostream& csv) {
    if (!(config.evolve_t_final > 0.0)) {
        throw ConfigError("[evolve] t_final must be positive for the evolve command");
    }

    DensityMatrix rho0 = ground_state();
    if (config.evolve_initial == "level2") {
        rho0.setZero();
        rho0(1, 1) = 1.0;
    } else if (config.evolve_initial == "level3") {
        rho0.setZero();
        rho0(2, 2) = 1.0;
    }

    EvolveConfig ecfg;
    ecfg.t_final = config.evolve_t_final;
    if (config.evolve_step > 0.0) {
        ecfg.step = config.evolve_step;
    } else {
        const double bound = stable_step(config.atom, config.drive);
        ecfg.step = std::isfinite(bound) ? bound : config.evolve_t_final / 1000.0;
    }

    const std::vector<EvolveSample> samples =
        evolve_trajectory(config.atom, config.drive, rho0, ecfg, config.evolve_samples);

    CsvWriter w(csv);
    write_echo(w, config);
    w.comment("integrator step = " + format_g12(ecfg.step) + " s");
    constexpr std::array<std::string_view, 5> cols = {"time_s", "rho11", "rho22", "rho33",
                                                      "abs_rho21"};
    w.columns(cols);
    for (const EvolveSample& s : samples) {
        const std::array<double, 5> row = {s.t, s.rho(0, 0).real(), s.rho(1, 1).real(),
                                           s.rho(2, 2).real(), std::abs(s.rho(1, 0))};
        w.row(row);
    }
}

void cmd_fit(const RunConfig& config, const Trace& trace, std::ostream& report) {
    CsvWriter header(report);
    write_echo(header, config);

    Trace working = trace;
    if (config.fit_domain == FitDomain::magnitude) {
        working.magnitude_only = true;
    }

    FitReport rep;
    if (config.fit_model == FitModel::two_level) {
        rep = fit_two_level(working);
    } else {
        rep = fit_eit(working, {config.atom.gamma_rel_21, config.atom.gamma_deph_21});
    }

    const auto line = [&report](const std::string& name, const FitEstimate& e) {
        report << name << " = " << format_g12(e.value) << " +- " << format_g12(e.sigma)
               << "\n";
    };
    report << "fit model: " << rep.model << " (" << rep.residual_domain << " residuals)\n";
    report << "converged: " << yes_no(rep.converged) << " after " << rep.iterations
           << " iterations\n";
    report << "residual_norm = " << format_g12(rep.residual_norm) << "\n";
    report << "gradient_norm = " << format_g12(rep.gradient_norm) << "\n";
    report << "identifiability_warning: " << yes_no(rep.identifiability_warning) << "\n";
    line("gamma_rel_21", rep.gamma_rel_21);
    line("gamma_deph_21", rep.gamma_deph_21);
    if (rep.gamma_deph_31) line("gamma_deph_31", *rep.gamma_deph_31);
    if (rep.omega_c_rabi) line("omega_c_rabi", *rep.omega_c_rabi);
    line("center_offset", rep.center_offset);
    report << "---\n";

    const auto kv = [&report](const std::string& key, const std::string& value) {
        report << "fit." << key << "=" << value << "\n";
    };
    kv("model", rep.model);
    kv("residual_domain", rep.residual_domain);
    kv("converged", rep.converged ? "1" : "0");
    kv("iterations", std::to_string(rep.iterations));
    kv("residual_norm", format_g12(rep.residual_norm));
    kv("gradient_norm", format_g12(rep.gradient_norm));
    kv("identifiability_warning", rep.identifiability_warning ? "1" : "0");
    kv("gamma_rel_21", format_g12(rep.gamma_rel_21.value));
    kv("gamma_rel_21_sigma", format_g12(rep.gamma_rel_21.sigma));
    kv("gamma_deph_21", format_g12(rep.gamma_deph_21.value));
    kv("gamma_deph_21_sigma", format_g12(rep.gamma_deph_21.sigma));
    if (rep.gamma_deph_31) {
        kv("gamma_deph_31", format_g12(rep.gamma_deph_31->value));
        kv("gamma_deph_31_sigma", format_g12(rep.gamma_deph_31->sigma));
    }
    if (rep.omega_c_rabi) {
        kv("omega_c_rabi", format_g12(rep.omega_c_rabi->value));
        kv("omega_c_rabi_sigma", format_g12(rep.omega_c_rabi->sigma));
    }
    kv("center_offset", format_g12(rep.center_offset.value));
    kv("center_offset_sigma", format_g12(rep.center_offset.sigma));
}

void cmd_atom_info(const RunConfig& config, std::ostream& out) {
    const AtomSpec& atom = config.atom;
    CsvWriter w(out);
    write_echo(w, config);

    out << "rates (angular / over-2pi):\n";
    const auto rate_line = [&out](const char* name, double value) {
        out << "  " << name << " = " << format_g12(value) << " 1/s  ("
            << format_g12(value / two_pi / 1e6) << " MHz)\n";
    };
    rate_line("gamma_rel_21", atom.gamma_rel_21);
    rate_line("gamma_rel_32", atom.gamma_rel_32);
    rate_line("gamma_deph_21", atom.gamma_deph_21);
    rate_line("gamma_deph_31", atom.gamma_deph_31);
    rate_line("gamma_deph_32", atom.gamma_deph_32);

    out << "radiative bounds:\n";
    const double bound21 = 0.5 * atom.gamma_rel_21;
    const double bound32 = 0.5 * (atom.gamma_rel_21 + atom.gamma_rel_32);
    out << "  gamma_deph_21 >= gamma_rel_21/2: " << format_g12(atom.gamma_deph_21) << " >= "
        << format_g12(bound21) << "  margin = " << format_g12(atom.gamma_deph_21 - bound21)
        << "\n";
    out << "  gamma_deph_32 >= (gamma_rel_21+gamma_rel_32)/2: "
        << format_g12(atom.gamma_deph_32) << " >= " << format_g12(bound32)
        << "  margin = " << format_g12(atom.gamma_deph_32 - bound32) << "\n";

    out << "defaults:\n";
    out << "  gamma_rel_32 defaulted: " << yes_no(config.gamma_rel_32_defaulted) << "\n";
    out << "  gamma_deph_32 defaulted: " << yes_no(config.gamma_deph_32_defaulted) << "\n";

    out << "coupling relation:\n";
    const bool have_line = atom.persistent_current > 0.0 && atom.omega21 > 0.0 &&
                           atom.line_impedance > 0.0;
    if (have_line && atom.gamma_rel_21 > 0.0) {
        const double m = rate_to_coupling(atom.gamma_rel_21, atom.persistent_current,
                                          atom.omega21, atom.line_impedance);
        out << "  M from gamma_rel_21: " << format_g12(m) << " H\n";
        out << "atom_info.m_from_rate=" << format_g12(m) << "\n";
    }
    if (have_line && atom.mutual_inductance > 0.0) {
        const double rate = coupling_to_rate(atom.mutual_inductance, atom.persistent_current,
                                             atom.omega21, atom.line_impedance);
        out << "  gamma_rel_21 from M: " << format_g12(rate) << " 1/s\n";
        out << "atom_info.rate_from_m=" << format_g12(rate) << "\n";
    }
    if (!have_line) {
        out << "  (persistent_current / omega21 / line_impedance not all set; skipped)\n";
    }
}

}  // namespace eitline
