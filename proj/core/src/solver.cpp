#include "eitline/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "eitline/errors.hpp"

namespace eitline {

namespace {

constexpr double positivity_floor = -1e-6;

inline int vec_index(int row, int col) { return row + 3 * col; }

// Sylvester test on rho + |floor| I: all leading principal minors positive
// means every eigenvalue of rho exceeds the floor. Cheaper than an
// eigensolve and exact enough at this threshold.
bool above_positivity_floor(const DensityMatrix& rho) {
    const double s = -positivity_floor;
    const double a00 = rho(0, 0).real() + s;
    if (!(a00 > 0.0)) return false;
    const double a11 = rho(1, 1).real() + s;
    const double d2 = a00 * a11 - std::norm(rho(0, 1));
    if (!(d2 > 0.0)) return false;
    Matrix3c shifted = rho;
    shifted(0, 0) += s;
    shifted(1, 1) += s;
    shifted(2, 2) += s;
    return shifted.determinant().real() > 0.0;
}

void check_positivity(const DensityMatrix& rho, double t) {
    if (above_positivity_floor(rho)) return;
    std::ostringstream msg;
    msg << "state eigenvalue " << min_eigenvalue(rho) << " below " << positivity_floor
        << " at t = " << t << " s (step too coarse or invalid initial state)";
    throw PositivityLost(msg.str());
}

DensityMatrix rk4_step(const AtomSpec& atom, const DriveSpec& drive, const DensityMatrix& rho,
                       double dt) {
    const Matrix3c k1 = master_rhs(atom, drive, rho);
    const Matrix3c k2 = master_rhs(atom, drive, (rho + (0.5 * dt) * k1).eval());
    const Matrix3c k3 = master_rhs(atom, drive, (rho + (0.5 * dt) * k2).eval());
    const Matrix3c k4 = master_rhs(atom, drive, (rho + dt * k3).eval());
    DensityMatrix next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    return (0.5 * (next + next.adjoint())).eval();
}

// Advance by exactly dt using full steps of cfg.step plus one shortened
// closing step. `t` tracks absolute time for error reporting only.
DensityMatrix integrate_span(const AtomSpec& atom, const DriveSpec& drive, DensityMatrix rho,
                             double dt, double step, double& t) {
    const auto n_full = static_cast<long long>(std::floor(dt / step * (1.0 + 1e-15)));
    for (long long i = 0; i < n_full; ++i) {
        rho = rk4_step(atom, drive, rho, step);
        t += step;
        check_positivity(rho, t);
    }
    const double rest = dt - static_cast<double>(n_full) * step;
    if (rest > step * 1e-12) {
        rho = rk4_step(atom, drive, rho, rest);
        t += rest;
        check_positivity(rho, t);
    }
    return rho;
}

void check_evolve_config(const AtomSpec& atom, const DriveSpec& drive, const EvolveConfig& cfg) {
    if (!(cfg.step > 0.0) || !(cfg.t_final >= 0.0)) {
        throw StepTooLarge("EvolveConfig requires step > 0 and t_final >= 0");
    }
    const double bound = stable_step(atom, drive);
    if (cfg.step > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "step " << cfg.step << " s exceeds stability bound " << bound << " s";
        throw StepTooLarge(msg.str());
    }
}

}  // namespace

Vector9c vectorize(const Matrix3c& m) {
    Vector9c v;
    for (int col = 0; col < 3; ++col) {
        for (int row = 0; row < 3; ++row) {
            v(vec_index(row, col)) = m(row, col);
        }
    }
    return v;
}

Matrix3c unvectorize(const Vector9c& v) {
    Matrix3c m;
    for (int col = 0; col < 3; ++col) {
        for (int row = 0; row < 3; ++row) {
            m(row, col) = v(vec_index(row, col));
        }
    }
    return m;
}

Liouvillian build_liouvillian(const AtomSpec& atom, const DriveSpec& drive) {
    const Matrix3c h = build_hamiltonian(drive);
    const std::complex<double> i_unit(0.0, 1.0);

    Liouvillian liou;
    Matrix9c& m = liou.matrix;

    // -i [H, rho] vectorizes to -i (I (x) H) + i (H^T (x) I).
    for (int b = 0; b < 3; ++b) {
        m.block<3, 3>(3 * b, 3 * b) -= i_unit * h;
    }
    for (int bi = 0; bi < 3; ++bi) {
        for (int bj = 0; bj < 3; ++bj) {
            const std::complex<double> coeff = i_unit * h(bj, bi);
            for (int d = 0; d < 3; ++d) {
                m(3 * bi + d, 3 * bj + d) += coeff;
            }
        }
    }

    // Dissipator: population cascade plus off-diagonal damping.
    m(vec_index(0, 0), vec_index(1, 1)) += atom.gamma_rel_21;
    m(vec_index(1, 1), vec_index(1, 1)) -= atom.gamma_rel_21;
    m(vec_index(1, 1), vec_index(2, 2)) += atom.gamma_rel_32;
    m(vec_index(2, 2), vec_index(2, 2)) -= atom.gamma_rel_32;
    m(vec_index(0, 1), vec_index(0, 1)) -= atom.gamma_deph_21;
    m(vec_index(1, 0), vec_index(1, 0)) -= atom.gamma_deph_21;
    m(vec_index(0, 2), vec_index(0, 2)) -= atom.gamma_deph_31;
    m(vec_index(2, 0), vec_index(2, 0)) -= atom.gamma_deph_31;
    m(vec_index(1, 2), vec_index(1, 2)) -= atom.gamma_deph_32;
    m(vec_index(2, 1), vec_index(2, 1)) -= atom.gamma_deph_32;

    return liou;
}

DensityMatrix steady_state(const AtomSpec& atom, const DriveSpec& drive) {
    Matrix9c a = build_liouvillian(atom, drive).matrix;

    // Replace the d(rho_11)/dt row with tr(rho) = 1.
    a.row(vec_index(0, 0)).setZero();
    a(vec_index(0, 0), vec_index(0, 0)) = 1.0;
    a(vec_index(0, 0), vec_index(1, 1)) = 1.0;
    a(vec_index(0, 0), vec_index(2, 2)) = 1.0;

    Vector9c b = Vector9c::Zero();
    b(vec_index(0, 0)) = 1.0;

    const Eigen::FullPivLU<Matrix9c> lu(a);
    if (!lu.isInvertible()) {
        throw SingularSystem(
            "trace-constrained Liouvillian is rank-deficient (degenerate parameters)");
    }
    Vector9c x = lu.solve(b);
    x += lu.solve(b - a * x);  // one refinement pass

    const Matrix3c rho = unvectorize(x);
    return (0.5 * (rho + rho.adjoint())).eval();
}

double max_rate(const AtomSpec& atom, const DriveSpec& drive) {
    return std::max({std::abs(drive.delta_p), std::abs(drive.delta_p + drive.delta_c),
                     drive.omega_p_rabi, drive.omega_c_rabi, atom.gamma_rel_21, atom.gamma_rel_32,
                     atom.gamma_deph_21, atom.gamma_deph_31, atom.gamma_deph_32});
}

double stable_step(const AtomSpec& atom, const DriveSpec& drive) {
    const double rate = max_rate(atom, drive);
    if (rate <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 0.05 / rate;
}

DensityMatrix evolve(const AtomSpec& atom, const DriveSpec& drive, const DensityMatrix& rho0,
                     const EvolveConfig& cfg) {
    check_evolve_config(atom, drive, cfg);
    double t = 0.0;
    check_positivity(rho0, t);
    return integrate_span(atom, drive, rho0, cfg.t_final, cfg.step, t);
}

std::vector<EvolveSample> evolve_trajectory(const AtomSpec& atom, const DriveSpec& drive,
                                            const DensityMatrix& rho0, const EvolveConfig& cfg,
                                            int samples) {
    check_evolve_config(atom, drive, cfg);
    if (samples < 2) {
        throw StepTooLarge("evolve_trajectory requires at least 2 samples");
    }
    double t = 0.0;
    check_positivity(rho0, t);

    std::vector<EvolveSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    out.push_back({0.0, rho0});

    DensityMatrix rho = rho0;
    for (int k = 1; k < samples; ++k) {
        const double target = cfg.t_final * static_cast<double>(k) / (samples - 1);
        const double span = target - out.back().t;
        rho = integrate_span(atom, drive, rho, span, cfg.step, t);
        out.push_back({target, rho});
    }
    return out;
}

}  // namespace eitline
