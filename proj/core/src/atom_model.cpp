#include "eitline/atom_model.hpp"

#include <algorithm>
#include <cmath>

namespace eitline {

namespace {

void require_nonnegative(std::vector<Violation>& out, const char* field, double value) {
    if (!(value >= 0.0)) {
        out.push_back({field, "negative rate"});
    }
}

}  // namespace

std::vector<Violation> validate_atom(const AtomSpec& atom) {
    std::vector<Violation> out;
    require_nonnegative(out, "gamma_rel_21", atom.gamma_rel_21);
    require_nonnegative(out, "gamma_rel_32", atom.gamma_rel_32);
    require_nonnegative(out, "gamma_deph_21", atom.gamma_deph_21);
    require_nonnegative(out, "gamma_deph_31", atom.gamma_deph_31);
    require_nonnegative(out, "gamma_deph_32", atom.gamma_deph_32);
    if (atom.gamma_deph_21 >= 0.0 && atom.gamma_deph_21 < 0.5 * atom.gamma_rel_21) {
        out.push_back({"gamma_deph_21", "below radiative bound gamma_rel_21/2"});
    }
    if (atom.gamma_deph_32 >= 0.0 &&
        atom.gamma_deph_32 < 0.5 * (atom.gamma_rel_21 + atom.gamma_rel_32)) {
        out.push_back({"gamma_deph_32", "below radiative bound (gamma_rel_21+gamma_rel_32)/2"});
    }
    if (!(atom.zeta_21 >= 0.0 && atom.zeta_21 <= 1.0)) {
        out.push_back({"zeta_21", "outside [0,1]"});
    }
    if (!(atom.zeta_32 >= 0.0 && atom.zeta_32 <= 1.0)) {
        out.push_back({"zeta_32", "outside [0,1]"});
    }
    if (!(atom.omega21 > 0.0)) {
        out.push_back({"omega21", "transition frequency must be positive"});
    }
    if (!(atom.omega32 > 0.0)) {
        out.push_back({"omega32", "transition frequency must be positive"});
    }
    return out;
}

std::vector<Violation> validate_drive(const DriveSpec& drive) {
    std::vector<Violation> out;
    if (!(drive.omega_p_rabi >= 0.0)) {
        out.push_back({"omega_p_rabi", "Rabi amplitude must be non-negative"});
    }
    if (!(drive.omega_c_rabi >= 0.0)) {
        out.push_back({"omega_c_rabi", "Rabi amplitude must be non-negative"});
    }
    if (!std::isfinite(drive.delta_p)) {
        out.push_back({"delta_p", "detuning must be finite"});
    }
    if (!std::isfinite(drive.delta_c)) {
        out.push_back({"delta_c", "detuning must be finite"});
    }
    return out;
}

double default_gamma_rel_32(const AtomSpec& atom) {
    return 2.0 * atom.gamma_rel_21;
}

double default_gamma_deph_32(const AtomSpec& atom) {
    // Additive pure-dephasing estimate, never below the radiative bound set
    // by the populated gamma_rel_32.
    const double additive =
        atom.gamma_deph_21 + atom.gamma_deph_31 - 0.5 * atom.gamma_rel_21;
    const double radiative = 0.5 * (atom.gamma_rel_21 + atom.gamma_rel_32);
    return std::max(additive, radiative);
}

OperatorMatrix build_hamiltonian(const DriveSpec& drive) {
    OperatorMatrix h = OperatorMatrix::Zero();
    h(1, 1) = -drive.delta_p;
    h(2, 2) = -(drive.delta_p + drive.delta_c);
    h(0, 1) = h(1, 0) = -0.5 * drive.omega_p_rabi;
    h(1, 2) = h(2, 1) = -0.5 * drive.omega_c_rabi;
    return h;
}

OperatorMatrix lindblad_apply(const AtomSpec& atom, const DensityMatrix& rho) {
    OperatorMatrix out = OperatorMatrix::Zero();
    // Cascade 3 -> 2 -> 1; no direct 3 -> 1 channel and no thermal excitation.
    out(0, 0) = atom.gamma_rel_21 * rho(1, 1);
    out(1, 1) = atom.gamma_rel_32 * rho(2, 2) - atom.gamma_rel_21 * rho(1, 1);
    out(2, 2) = -atom.gamma_rel_32 * rho(2, 2);
    out(0, 1) = -atom.gamma_deph_21 * rho(0, 1);
    out(1, 0) = -atom.gamma_deph_21 * rho(1, 0);
    out(0, 2) = -atom.gamma_deph_31 * rho(0, 2);
    out(2, 0) = -atom.gamma_deph_31 * rho(2, 0);
    out(1, 2) = -atom.gamma_deph_32 * rho(1, 2);
    out(2, 1) = -atom.gamma_deph_32 * rho(2, 1);
    return out;
}

OperatorMatrix master_rhs(const AtomSpec& atom, const DriveSpec& drive, const DensityMatrix& rho) {
    const OperatorMatrix h = build_hamiltonian(drive);
    const std::complex<double> minus_i(0.0, -1.0);
    return (minus_i * (h * rho - rho * h) + lindblad_apply(atom, rho)).eval();
}

double hermiticity_error(const Matrix3c& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Matrix3c& m) {
    const Matrix3c sym = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityMatrix ground_state() {
    DensityMatrix rho = DensityMatrix::Zero();
    rho(0, 0) = 1.0;
    return rho;
}

}  // namespace eitline
