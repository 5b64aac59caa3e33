#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "eitline/errors.hpp"
#include "eitline/solver.hpp"
#include "support/device_params.hpp"

using namespace eitline;
using test::device_atom;

TEST_CASE("vectorization is column-major and reversible") {
    Matrix3c m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m(i, j) = std::complex<double>(i, j);
        }
    }
    const Vector9c v = vectorize(m);
    // column 0 first: entries (0,0), (1,0), (2,0), then column 1...
    CHECK(v(0) == m(0, 0));
    CHECK(v(1) == m(1, 0));
    CHECK(v(2) == m(2, 0));
    CHECK(v(3) == m(0, 1));
    CHECK(v(8) == m(2, 2));
    CHECK((unvectorize(v) - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("liouvillian: no drive, no dissipation gives the zero matrix") {
    AtomSpec atom;
    atom.omega21 = 1.0;
    atom.omega32 = 1.0;
    const Liouvillian liou = build_liouvillian(atom, DriveSpec{});
    CHECK(liou.matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("liouvillian: undriven kernel contains the ground state") {
    const Liouvillian liou = build_liouvillian(device_atom(), DriveSpec{});
    const Vector9c image = liou.matrix * vectorize(ground_state());
    CHECK(image.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("liouvillian action agrees with master_rhs on random states") {
    // The matrix is assembled from Kronecker blocks, master_rhs from 3x3
    // algebra; agreement on 100 random Hermitian matrices ties them together.
    std::mt19937 rng(21);
    for (int k = 0; k < 100; ++k) {
        const AtomSpec atom = test::random_atom(rng);
        const DriveSpec drive = test::random_drive(rng);
        const Matrix3c rho = test::random_hermitian(rng);
        const Liouvillian liou = build_liouvillian(atom, drive);
        const Vector9c via_matrix = liou.matrix * vectorize(rho);
        const Vector9c via_rhs = vectorize(master_rhs(atom, drive, rho));
        const double scale = max_rate(atom, drive);
        CHECK((via_matrix - via_rhs).cwiseAbs().maxCoeff() < 1e-12 * scale);
    }
}

TEST_CASE("liouvillian has a near-zero eigenvalue") {
    const AtomSpec atom = device_atom();
    DriveSpec drive;
    drive.omega_p_rabi = 2e6;
    drive.omega_c_rabi = two_pi * 44e6;
    const Liouvillian liou = build_liouvillian(atom, drive);
    const Eigen::ComplexEigenSolver<Matrix9c> es(liou.matrix);
    double smallest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 9; ++i) {
        smallest = std::min(smallest, std::abs(es.eigenvalues()(i)));
    }
    CHECK(smallest < 1e-6 * atom.gamma_rel_21);
}

TEST_CASE("steady state: undriven atom relaxes to the ground state") {
    const DensityMatrix rho = steady_state(device_atom(), DriveSpec{});
    CHECK((rho - ground_state()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("steady state: weak probe coherence reproduces the line-shape value") {
    // Oracle: resonant weak-probe response 1 + i G r21 / Op -> 1 - G/(2 g21)
    // = 0.23333 for the device rates.
    const AtomSpec atom = device_atom();
    DriveSpec drive;
    drive.omega_p_rabi = two_pi * 2e4;
    const DensityMatrix rho = steady_state(atom, drive);
    const std::complex<double> response =
        1.0 + std::complex<double>(0.0, 1.0) * atom.gamma_rel_21 * rho(1, 0) /
                  drive.omega_p_rabi;
    CHECK(std::abs(response - 0.2333333) < 1e-3);
    CHECK(std::abs(response.imag()) < 1e-6);
}

TEST_CASE("steady state satisfies the density-matrix invariants") {
    std::mt19937 rng(22);
    for (int k = 0; k < 100; ++k) {
        const AtomSpec atom = test::random_atom(rng);
        const DriveSpec drive = test::random_drive(rng);
        const DensityMatrix rho = steady_state(atom, drive);
        CHECK(hermiticity_error(rho) < 1e-12);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
        CHECK(min_eigenvalue(rho) > -1e-10);
        const double residual =
            master_rhs(atom, drive, rho).cwiseAbs().maxCoeff();
        CHECK(residual < 1e-10 * atom.gamma_rel_21);
    }
}

TEST_CASE("steady state: degenerate parameters raise SingularSystem") {
    AtomSpec dead;
    dead.omega21 = 1.0;
    dead.omega32 = 1.0;
    CHECK_THROWS_AS((void)steady_state(dead, DriveSpec{}), SingularSystem);
}

TEST_CASE("steady state is invariant under a common rate rescaling") {
    const AtomSpec atom = device_atom();
    DriveSpec drive;
    drive.omega_p_rabi = 3e6;
    drive.omega_c_rabi = two_pi * 30e6;
    drive.delta_p = 2e7;
    drive.delta_c = -1e7;
    const DensityMatrix reference = steady_state(atom, drive);

    for (const double lambda : {0.1, 3.7, 10.0}) {
        AtomSpec scaled_atom = atom;
        scaled_atom.gamma_rel_21 *= lambda;
        scaled_atom.gamma_rel_32 *= lambda;
        scaled_atom.gamma_deph_21 *= lambda;
        scaled_atom.gamma_deph_31 *= lambda;
        scaled_atom.gamma_deph_32 *= lambda;
        DriveSpec scaled_drive;
        scaled_drive.omega_p_rabi = drive.omega_p_rabi * lambda;
        scaled_drive.omega_c_rabi = drive.omega_c_rabi * lambda;
        scaled_drive.delta_p = drive.delta_p * lambda;
        scaled_drive.delta_c = drive.delta_c * lambda;
        const DensityMatrix scaled = steady_state(scaled_atom, scaled_drive);
        CHECK((scaled - reference).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("liouvillian zero-eigenvector matches the steady state") {
    std::mt19937 rng(23);
    for (int k = 0; k < 20; ++k) {
        const AtomSpec atom = test::random_atom(rng);
        const DriveSpec drive = test::random_drive(rng);
        const Liouvillian liou = build_liouvillian(atom, drive);
        const Eigen::ComplexEigenSolver<Matrix9c> es(liou.matrix);
        int zero_index = 0;
        double smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 9; ++i) {
            const double mag = std::abs(es.eigenvalues()(i));
            if (mag < smallest) {
                smallest = mag;
                zero_index = i;
            }
        }
        Matrix3c kernel_state = unvectorize(es.eigenvectors().col(zero_index));
        kernel_state /= kernel_state.trace();
        const DensityMatrix direct = steady_state(atom, drive);
        CHECK((kernel_state - direct).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("evolve: undriven level 2 decays exponentially") {
    const AtomSpec atom = device_atom();
    EvolveConfig cfg;
    cfg.t_final = 1.0 / atom.gamma_rel_21;
    cfg.step = stable_step(atom, DriveSpec{});
    const DensityMatrix rho = evolve(atom, DriveSpec{}, test::level_state(1), cfg);
    CHECK(std::abs(rho(1, 1).real() - std::exp(-1.0)) < 1e-4);
}

TEST_CASE("evolve: ground state stays put") {
    const AtomSpec atom = device_atom();
    EvolveConfig cfg;
    cfg.t_final = 10.0 / atom.gamma_rel_21;
    cfg.step = stable_step(atom, DriveSpec{});
    const DensityMatrix rho = evolve(atom, DriveSpec{}, ground_state(), cfg);
    CHECK((rho - ground_state()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evolve: level 3 cascades down to the ground state") {
    const AtomSpec atom = device_atom();
    EvolveConfig cfg;
    cfg.t_final = 200.0 / std::min(atom.gamma_rel_21, atom.gamma_rel_32);
    cfg.step = stable_step(atom, DriveSpec{});
    const DensityMatrix rho = evolve(atom, DriveSpec{}, test::level_state(2), cfg);
    CHECK((rho - ground_state()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("evolve rejects a step beyond the stability bound") {
    const AtomSpec atom = device_atom();
    EvolveConfig cfg;
    cfg.t_final = 1e-7;
    cfg.step = 2.0 * stable_step(atom, DriveSpec{});
    CHECK_THROWS_AS((void)evolve(atom, DriveSpec{}, ground_state(), cfg), StepTooLarge);

    cfg.step = 0.0;
    CHECK_THROWS_AS((void)evolve(atom, DriveSpec{}, ground_state(), cfg), StepTooLarge);
}

TEST_CASE("evolve flags a non-positive initial state") {
    const AtomSpec atom = device_atom();
    DensityMatrix bad = DensityMatrix::Zero();
    bad(0, 0) = 1.1;
    bad(1, 1) = -0.1;
    EvolveConfig cfg;
    cfg.t_final = 1e-9;
    cfg.step = stable_step(atom, DriveSpec{});
    CHECK_THROWS_AS((void)evolve(atom, DriveSpec{}, bad, cfg), PositivityLost);
}

TEST_CASE("evolve preserves trace and positivity under drive") {
    std::mt19937 rng(24);
    for (int k = 0; k < 10; ++k) {
        const AtomSpec atom = test::random_atom(rng);
        const DriveSpec drive = test::random_drive(rng);
        const DensityMatrix rho0 = test::random_density(rng);
        EvolveConfig cfg;
        cfg.t_final = 20.0 / test::min_positive_rate(atom);
        cfg.step = stable_step(atom, drive);
        const DensityMatrix rho = evolve(atom, drive, rho0, cfg);
        CHECK(std::abs(rho.trace() - 1.0) < 1e-9);
        CHECK(hermiticity_error(rho) == 0.0);
        CHECK(min_eigenvalue(rho) > -1e-6);
    }
}

TEST_CASE("two independent algorithms, one contract: evolve meets steady_state") {
    std::mt19937 rng(25);
    for (int k = 0; k < 20; ++k) {
        const AtomSpec atom = test::random_atom(rng);
        const DriveSpec drive = test::random_drive(rng);
        const DensityMatrix target = steady_state(atom, drive);
        EvolveConfig cfg;
        cfg.t_final = 200.0 / test::min_positive_rate(atom);
        cfg.step = stable_step(atom, drive);
        const DensityMatrix relaxed = evolve(atom, drive, ground_state(), cfg);
        CHECK((relaxed - target).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("evolve_trajectory samples are consistent with single-shot evolve") {
    const AtomSpec atom = device_atom();
    DriveSpec drive;
    drive.omega_p_rabi = 2e7;
    EvolveConfig cfg;
    cfg.t_final = 5.0 / atom.gamma_rel_21;
    cfg.step = stable_step(atom, drive);
    const auto samples = evolve_trajectory(atom, drive, ground_state(), cfg, 11);
    REQUIRE(samples.size() == 11);
    CHECK(samples.front().t == 0.0);
    CHECK(samples.back().t == doctest::Approx(cfg.t_final));

    const DensityMatrix direct = evolve(atom, drive, ground_state(), cfg);
    CHECK((samples.back().rho - direct).cwiseAbs().maxCoeff() < 1e-9);
}
