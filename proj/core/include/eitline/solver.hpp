#pragma once

#include <vector>

#include "eitline/atom_model.hpp"

namespace eitline {

using Matrix9c = Eigen::Matrix<std::complex<double>, 9, 9>;
using Vector9c = Eigen::Matrix<std::complex<double>, 9, 1>;

/// Generator of the vectorized master equation, acting on the column-major
/// vectorization of rho: vec(rho)[i + 3j] = rho(i, j).
struct Liouvillian {
    Matrix9c matrix = Matrix9c::Zero();
};

Vector9c vectorize(const Matrix3c& m);
Matrix3c unvectorize(const Vector9c& v);

/// Assembled directly from the Kronecker form of -i[H,.] plus the dissipator
/// entries, independently of master_rhs, so the two can cross-check each
/// other.
Liouvillian build_liouvillian(const AtomSpec& atom, const DriveSpec& drive);

/// Exact steady state: one row of the Liouvillian is replaced by the trace
/// constraint and the resulting dense 9x9 system solved by pivoted
/// elimination (one iterative-refinement pass). Throws SingularSystem when
/// the constrained system is rank-deficient; never regularizes silently.
DensityMatrix steady_state(const AtomSpec& atom, const DriveSpec& drive);

struct EvolveConfig {
    double step = 0.0;     // s; must satisfy step <= 0.05 / max_rate
    double t_final = 0.0;  // s
};

/// Largest frequency scale in the generator; sets the integrator stability
/// bound.
double max_rate(const AtomSpec& atom, const DriveSpec& drive);
double stable_step(const AtomSpec& atom, const DriveSpec& drive);  // 0.05 / max_rate

/// Fixed-step classical 4th-order integration of master_rhs. The state is
/// re-symmetrized each step; positivity is checked, not projected
/// (PositivityLost when any eigenvalue drops below -1e-6).
DensityMatrix evolve(const AtomSpec& atom, const DriveSpec& drive, const DensityMatrix& rho0,
                     const EvolveConfig& cfg);

struct EvolveSample {
    double t = 0.0;
    DensityMatrix rho;
};

/// Same integration as evolve, recording `samples` evenly spaced states
/// (including the final one).
std::vector<EvolveSample> evolve_trajectory(const AtomSpec& atom, const DriveSpec& drive,
                                            const DensityMatrix& rho0, const EvolveConfig& cfg,
                                            int samples);

}  // namespace eitline
