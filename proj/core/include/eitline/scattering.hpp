#pragma once

#include <complex>

#include "eitline/atom_model.hpp"

namespace eitline {

/// Microwave observables of a pointlike side-coupled scatterer. Reflection
/// is r = t - 1, so |r| = 1 at perfect extinction; the normalized
/// polarizability is alpha = i(1 - t). T may exceed 1 by floating-point
/// epsilon; it is clamped at the I/O layer only.
struct ScatteringPoint {
    std::complex<double> t{1.0, 0.0};
    std::complex<double> r{0.0, 0.0};
    double T = 1.0;
    std::complex<double> alpha{0.0, 0.0};
};

ScatteringPoint scattering_point_from_t(std::complex<double> t);

/// Transmission from the exact steady state: t = 1 + i Gamma_21 rho_21 / Omega_p.
/// The sign convention is pinned operationally: it must reduce to
/// transmission_weak_probe when Omega_p << gamma_21 (guarded by a permanent
/// regression test). Valid at any probe power.
ScatteringPoint transmission_numeric(const AtomSpec& atom, const DriveSpec& drive);

/// Closed-form weak-probe transmission:
///   t = 1 - Gamma_21 / [2(gamma_21 - i dp) + Oc^2 / (2(gamma_31 - i dp - i dc))].
/// Caller is responsible for the Omega_p << gamma_21 relevance; the
/// documented regime is Omega_p <= gamma_21/10.
ScatteringPoint transmission_weak_probe(const AtomSpec& atom, const DriveSpec& drive);

/// Ideal resonant power transmission without pure dephasing:
///   T = (Oc^2 / (2 Gamma_21 gamma_31 + Oc^2))^2.
double power_transmission_ideal(double omega_c_rabi, double gamma_rel_21, double gamma_deph_31);

/// Radiative coupling relation Gamma_21 = omega21 (M i_pc)^2 / (hbar Z) and
/// its inverse solving for the mutual inductance. All arguments positive.
double coupling_to_rate(double mutual_inductance, double persistent_current, double omega21,
                        double line_impedance);
double rate_to_coupling(double gamma_rel_21, double persistent_current, double omega21,
                        double line_impedance);

}  // namespace eitline
