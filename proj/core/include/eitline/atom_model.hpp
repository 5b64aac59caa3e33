#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eitline {

inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double two_pi = 6.28318530717958647692528676656;

/// 3x3 complex matrices. Density matrices are dimensionless; operator
/// matrices (H/hbar, dissipator output) carry units of 1/s.
using Matrix3c = Eigen::Matrix3cd;
using DensityMatrix = Eigen::Matrix3cd;
using OperatorMatrix = Eigen::Matrix3cd;

/// Ladder atom |1> -- |2> -- |3> with allowed 1<->2 and 2<->3 transitions.
/// All frequencies and rates are angular (rad/s, 1/s); "/2pi in MHz" inputs
/// are converted at the I/O boundary.
struct AtomSpec {
    double omega21 = 0.0;        // |1>-|2> transition frequency, rad/s
    double omega32 = 0.0;        // |2>-|3> transition frequency, rad/s
    double gamma_rel_21 = 0.0;   // relaxation 2->1, 1/s
    double gamma_rel_32 = 0.0;   // relaxation 3->2, 1/s
    double gamma_deph_21 = 0.0;  // damping of rho_21, 1/s
    double gamma_deph_31 = 0.0;  // damping of rho_31, 1/s
    double gamma_deph_32 = 0.0;  // damping of rho_32, 1/s
    double zeta_21 = 1.0;        // dimensionless dipole matrix element
    double zeta_32 = 1.0;
    double mutual_inductance = 0.0;   // H
    double persistent_current = 0.0;  // A
    double line_impedance = 0.0;      // ohm
};

/// Probe couples |1>-|2>, control couples |2>-|3>. Both Rabi amplitudes are
/// taken real and non-negative; a global drive phase does not change |t|.
struct DriveSpec {
    double omega_p_rabi = 0.0;  // probe Rabi amplitude, rad/s
    double omega_c_rabi = 0.0;  // control Rabi amplitude, rad/s
    double delta_p = 0.0;       // probe detuning, rad/s
    double delta_c = 0.0;       // control detuning, rad/s
};

struct Violation {
    std::string field;
    std::string message;
};

/// Empty iff all AtomSpec invariants hold: rates non-negative, dephasing
/// above the radiative bounds (gamma_21 >= Gamma_21/2,
/// gamma_32 >= (Gamma_21+Gamma_32)/2), zeta in [0,1], transition
/// frequencies positive.
std::vector<Violation> validate_atom(const AtomSpec& atom);

std::vector<Violation> validate_drive(const DriveSpec& drive);

/// Fallbacks for the two rates the source data leaves free. Both are
/// user-overridable at the config layer.
double default_gamma_rel_32(const AtomSpec& atom);   // 2 * gamma_rel_21
double default_gamma_deph_32(const AtomSpec& atom);  // additive dephasing, clamped to the radiative bound

/// Rotating-frame Hamiltonian over hbar:
///   H/hbar = -(dp s22 + (dp+dc) s33) - Op/2 (s21+s12) - Oc/2 (s32+s23).
/// Exactly Hermitian by construction.
OperatorMatrix build_hamiltonian(const DriveSpec& drive);

/// Dissipator: population cascade 3->2->1 at Gamma_32, Gamma_21 and decay of
/// every off-diagonal rho_ij at gamma_ij. Traceless; Hermitian for
/// Hermitian rho.
OperatorMatrix lindblad_apply(const AtomSpec& atom, const DensityMatrix& rho);

/// drho/dt = -i [H/hbar, rho] + L[rho].
OperatorMatrix master_rhs(const AtomSpec& atom, const DriveSpec& drive, const DensityMatrix& rho);

// Density-matrix diagnostics used by solver contracts and tests.
double hermiticity_error(const Matrix3c& m);  // max |m - m^dagger| entrywise
double min_eigenvalue(const Matrix3c& m);     // smallest eigenvalue of the Hermitian part

DensityMatrix ground_state();  // |1><1|

}  // namespace eitline
