#include <benchmark/benchmark.h>

#include <vector>

#include "eitline/experiments.hpp"
#include "eitline/fit.hpp"
#include "eitline/scattering.hpp"
#include "eitline/solver.hpp"

namespace {

eitline::AtomSpec device_atom() {
    eitline::AtomSpec atom;
    atom.omega21 = eitline::two_pi * 10.165e9;
    atom.omega32 = eitline::two_pi * 24.465e9;
    atom.gamma_rel_21 = 6.9e7;
    atom.gamma_deph_21 = 4.5e7;
    atom.gamma_deph_31 = 4.3e7;
    atom.gamma_rel_32 = eitline::default_gamma_rel_32(atom);
    atom.gamma_deph_32 = eitline::default_gamma_deph_32(atom);
    return atom;
}

void BM_SteadyState(benchmark::State& state) {
    const eitline::AtomSpec atom = device_atom();
    eitline::DriveSpec drive;
    drive.omega_p_rabi = 1e6;
    drive.omega_c_rabi = eitline::two_pi * 44e6;
    drive.delta_p = 1e7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eitline::steady_state(atom, drive));
    }
}
BENCHMARK(BM_SteadyState);

void BM_WeakProbePoint(benchmark::State& state) {
    const eitline::AtomSpec atom = device_atom();
    eitline::DriveSpec drive;
    drive.omega_c_rabi = eitline::two_pi * 44e6;
    drive.delta_p = 1e7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eitline::transmission_weak_probe(atom, drive));
    }
}
BENCHMARK(BM_WeakProbePoint);

void BM_SweepProbe(benchmark::State& state) {
    const eitline::AtomSpec atom = device_atom();
    eitline::DriveSpec base;
    base.omega_c_rabi = eitline::two_pi * 44e6;
    std::vector<double> grid(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = -eitline::two_pi * 50e6 +
                  eitline::two_pi * 100e6 * static_cast<double>(i) /
                      static_cast<double>(grid.size() - 1);
    }
    const auto mode = state.range(1) ? eitline::SweepMode::full_numeric
                                     : eitline::SweepMode::weak_probe_analytic;
    for (auto _ : state) {
        benchmark::DoNotOptimize(eitline::sweep_probe(atom, base, grid, mode));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SweepProbe)->Args({481, 0})->Args({481, 1});

void BM_Rk4Evolve(benchmark::State& state) {
    const eitline::AtomSpec atom = device_atom();
    eitline::DriveSpec drive;
    drive.omega_p_rabi = 2e7;
    eitline::EvolveConfig cfg;
    cfg.t_final = 10.0 / atom.gamma_rel_21;
    cfg.step = eitline::stable_step(atom, drive);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            eitline::evolve(atom, drive, eitline::ground_state(), cfg));
    }
}
BENCHMARK(BM_Rk4Evolve);

void BM_FitTwoLevel(benchmark::State& state) {
    const eitline::AtomSpec atom = device_atom();
    eitline::Trace trace;
    const int points = 201;
    for (int i = 0; i < points; ++i) {
        const double delta =
            -eitline::two_pi * 60e6 + eitline::two_pi * 120e6 * i / (points - 1);
        eitline::DriveSpec drive;
        drive.delta_p = delta;
        trace.delta_p.push_back(delta);
        trace.t.push_back(eitline::transmission_weak_probe(atom, drive).t);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(eitline::fit_two_level(trace));
    }
}
BENCHMARK(BM_FitTwoLevel);

}  // namespace

BENCHMARK_MAIN();
