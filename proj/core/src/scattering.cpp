#include "eitline/scattering.hpp"

#include <cmath>

#include "eitline/errors.hpp"
#include "eitline/solver.hpp"

namespace eitline {

ScatteringPoint scattering_point_from_t(std::complex<double> t) {
    ScatteringPoint p;
    p.t = t;
    p.r = t - 1.0;
    p.T = std::norm(t);
    p.alpha = std::complex<double>(0.0, 1.0) * (1.0 - t);
    return p;
}

ScatteringPoint transmission_numeric(const AtomSpec& atom, const DriveSpec& drive) {
    if (drive.omega_p_rabi == 0.0) {
        throw ZeroProbe("transmission_numeric requires a probe drive (omega_p_rabi > 0)");
    }
    const DensityMatrix rho = steady_state(atom, drive);
    const std::complex<double> i_unit(0.0, 1.0);
    const std::complex<double> t =
        1.0 + i_unit * atom.gamma_rel_21 * rho(1, 0) / drive.omega_p_rabi;
    return scattering_point_from_t(t);
}

ScatteringPoint transmission_weak_probe(const AtomSpec& atom, const DriveSpec& drive) {
    const std::complex<double> i_unit(0.0, 1.0);
    std::complex<double> denom =
        2.0 * (atom.gamma_deph_21 - i_unit * drive.delta_p);
    if (drive.omega_c_rabi != 0.0) {
        const std::complex<double> inner =
            atom.gamma_deph_31 - i_unit * (drive.delta_p + drive.delta_c);
        if (inner == 0.0) {
            throw DegenerateDenominator(
                "two-photon pole: gamma_deph_31 = 0 and delta_p + delta_c = 0 with control on");
        }
        denom += drive.omega_c_rabi * drive.omega_c_rabi / (2.0 * inner);
    }
    if (atom.gamma_rel_21 == 0.0) {
        return scattering_point_from_t(1.0);  // decoupled atom
    }
    if (denom == 0.0) {
        throw DegenerateDenominator("weak-probe transmission denominator vanishes");
    }
    return scattering_point_from_t(1.0 - atom.gamma_rel_21 / denom);
}

double power_transmission_ideal(double omega_c_rabi, double gamma_rel_21, double gamma_deph_31) {
    const double oc2 = omega_c_rabi * omega_c_rabi;
    const double denom = 2.0 * gamma_rel_21 * gamma_deph_31 + oc2;
    if (denom == 0.0) {
        throw DegenerateDenominator(
            "ideal transmission undefined: omega_c_rabi = 0 and gamma_rel_21*gamma_deph_31 = 0");
    }
    const double ratio = oc2 / denom;
    return ratio * ratio;
}

double coupling_to_rate(double mutual_inductance, double persistent_current, double omega21,
                        double line_impedance) {
    const double flux = mutual_inductance * persistent_current;
    return omega21 * flux * flux / (hbar * line_impedance);
}

double rate_to_coupling(double gamma_rel_21, double persistent_current, double omega21,
                        double line_impedance) {
    return std::sqrt(gamma_rel_21 * hbar * line_impedance / omega21) / persistent_current;
}

}  // namespace eitline
