#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "eitline/errors.hpp"
#include "eitline/experiments.hpp"
#include "support/device_params.hpp"

using namespace eitline;
using test::device_atom;

namespace {

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = lo + (hi - lo) * i / (points - 1);
    }
    return grid;
}

// Brute-force dip locator on a dense grid, independent of dip_splitting.
std::vector<double> brute_force_minima(const AtomSpec& atom, const DriveSpec& base,
                                       double half_span, int points) {
    const auto grid = linspace(-half_span, half_span, points);
    std::vector<double> t_power(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        DriveSpec d = base;
        d.delta_p = grid[i];
        t_power[i] = transmission_weak_probe(atom, d).T;
    }
    std::vector<double> minima;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (t_power[i] < t_power[i - 1] && t_power[i] < t_power[i + 1]) {
            minima.push_back(grid[i]);
        }
    }
    return minima;
}

}  // namespace

TEST_CASE("sweep_probe: control off gives a single resonant dip") {
    const AtomSpec atom = device_atom();
    const auto grid = linspace(-two_pi * 50e6, two_pi * 50e6, 401);
    const SweepResult sweep =
        sweep_probe(atom, DriveSpec{}, grid, SweepMode::weak_probe_analytic);

    REQUIRE(sweep.points.size() == grid.size());
    double min_re = 2.0;
    double min_pos = 0.0;
    for (const auto& p : sweep.points) {
        REQUIRE(p.ok);
        if (p.value.t.real() < min_re) {
            min_re = p.value.t.real();
            min_pos = p.axis1;
        }
    }
    CHECK(min_re == doctest::Approx(0.2333333).epsilon(1e-6));
    CHECK(std::abs(min_pos) < 1.0);  // resonance, up to grid rounding
    CHECK(dip_splitting(sweep) == std::nullopt);
}

TEST_CASE("sweep_probe: strongest control drive opens a transparency window") {
    const AtomSpec atom = device_atom();
    DriveSpec base;
    base.omega_c_rabi = two_pi * 44e6;
    const auto grid = linspace(-two_pi * 60e6, two_pi * 60e6, 601);
    const SweepResult sweep = sweep_probe(atom, base, grid, SweepMode::weak_probe_analytic);

    // local maximum of Re t at resonance, near full transparency
    const std::size_t center = grid.size() / 2;
    const double re_center = sweep.points[center].value.t.real();
    CHECK(re_center == doctest::Approx(0.9295).epsilon(1e-3));
    CHECK(re_center > sweep.points[center - 5].value.t.real());
    CHECK(re_center > sweep.points[center + 5].value.t.real());

    const auto split = dip_splitting(sweep);
    REQUIRE(split.has_value());
    CHECK(split->lower < 0.0);
    CHECK(split->upper > 0.0);
}

TEST_CASE("sweep_probe: a decoupled atom sweeps flat") {
    AtomSpec atom = device_atom();
    atom.gamma_rel_21 = 0.0;
    atom.gamma_deph_21 = 0.0;  // keep the radiative bound satisfied
    const auto grid = linspace(-1e8, 1e8, 21);
    const SweepResult sweep =
        sweep_probe(atom, DriveSpec{}, grid, SweepMode::weak_probe_analytic);
    for (const auto& p : sweep.points) {
        REQUIRE(p.ok);
        CHECK(p.value.t == std::complex<double>(1.0, 0.0));
    }
}

TEST_CASE("sweep results are identical for serial and concurrent evaluation") {
    const AtomSpec atom = device_atom();
    DriveSpec base;
    base.omega_p_rabi = 4.5e4;
    base.omega_c_rabi = two_pi * 20e6;
    const auto grid = linspace(-two_pi * 40e6, two_pi * 40e6, 101);

    for (const SweepMode mode : {SweepMode::weak_probe_analytic, SweepMode::full_numeric}) {
        const SweepResult serial = sweep_probe(atom, base, grid, mode, 1);
        const SweepResult parallel = sweep_probe(atom, base, grid, mode, 4);
        REQUIRE(serial.points.size() == parallel.points.size());
        for (std::size_t i = 0; i < serial.points.size(); ++i) {
            // bit-for-bit equality, not approximate
            CHECK(serial.points[i].value.t == parallel.points[i].value.t);
            CHECK(serial.points[i].value.T == parallel.points[i].value.T);
        }
    }
}

TEST_CASE("analytic and numeric sweeps agree for a thousandth-scale probe") {
    const AtomSpec atom = device_atom();
    DriveSpec base;
    base.omega_p_rabi = atom.gamma_deph_21 / 1000.0;
    base.omega_c_rabi = two_pi * 44e6;
    const auto grid = linspace(-two_pi * 50e6, two_pi * 50e6, 81);

    const SweepResult analytic =
        sweep_probe(atom, base, grid, SweepMode::weak_probe_analytic, 2);
    const SweepResult numeric = sweep_probe(atom, base, grid, SweepMode::full_numeric, 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(analytic.points[i].value.t - numeric.points[i].value.t) < 1e-3);
    }
}

TEST_CASE("analytic/numeric agreement holds across the reference grids") {
    // Spectrum ladder, 2D map and extinction grid as shipped, with a probe
    // a thousand times below the coherence damping.
    const AtomSpec atom = device_atom();
    DriveSpec base;
    base.omega_p_rabi = atom.gamma_deph_21 / 1000.0;

    const auto dp_grid = linspace(-two_pi * 60e6, two_pi * 60e6, 481);
    double worst = 0.0;
    for (const double oc_mhz : {0.0, 11.0, 22.0, 44.0}) {
        base.omega_c_rabi = two_pi * oc_mhz * 1e6;
        const SweepResult a = sweep_probe(atom, base, dp_grid,
                                          SweepMode::weak_probe_analytic, 4);
        const SweepResult n = sweep_probe(atom, base, dp_grid, SweepMode::full_numeric, 4);
        for (std::size_t i = 0; i < dp_grid.size(); ++i) {
            worst = std::max(worst, std::abs(a.points[i].value.t - n.points[i].value.t));
        }
    }
    CHECK(worst < 1e-3);

    // map grid, decimated to keep the suite fast
    const auto dp_coarse = linspace(-two_pi * 60e6, two_pi * 60e6, 61);
    const auto oc_coarse = linspace(0.0, two_pi * 100e6, 26);
    const SweepResult map_a = sweep_map(atom, base, dp_coarse, oc_coarse,
                                        SweepMode::weak_probe_analytic, 4);
    const SweepResult map_n =
        sweep_map(atom, base, dp_coarse, oc_coarse, SweepMode::full_numeric, 4);
    double worst_map = 0.0;
    for (std::size_t i = 0; i < map_a.points.size(); ++i) {
        worst_map =
            std::max(worst_map, std::abs(map_a.points[i].value.t - map_n.points[i].value.t));
    }
    CHECK(worst_map < 1e-3);

    // extinction grid: numeric curve needs the probe carried through
    const auto oc_grid = linspace(0.0, two_pi * 100e6, 201);
    const SweepResult ext_a = extinction_curve(atom, oc_grid);
    const SweepResult ext_n =
        extinction_curve(atom, oc_grid, SweepMode::full_numeric, base, 4);
    double worst_ext = 0.0;
    for (std::size_t i = 0; i < oc_grid.size(); ++i) {
        worst_ext =
            std::max(worst_ext, std::abs(ext_a.points[i].value.T - ext_n.points[i].value.T));
    }
    CHECK(worst_ext < 1e-3);
}

TEST_CASE("sweep_map: control-off column equals the 1D sweep") {
    const AtomSpec atom = device_atom();
    const auto dp_grid = linspace(-two_pi * 30e6, two_pi * 30e6, 41);
    const std::vector<double> oc_grid = {0.0, two_pi * 10e6, two_pi * 44e6};

    const SweepResult map =
        sweep_map(atom, DriveSpec{}, dp_grid, oc_grid, SweepMode::weak_probe_analytic);
    const SweepResult line =
        sweep_probe(atom, DriveSpec{}, dp_grid, SweepMode::weak_probe_analytic);

    REQUIRE(map.points.size() == dp_grid.size() * oc_grid.size());
    for (std::size_t i = 0; i < dp_grid.size(); ++i) {
        CHECK(map.points[i].value.t == line.points[i].value.t);
    }
}

TEST_CASE("sweep_map is symmetric in the probe detuning at zero control detuning") {
    const AtomSpec atom = device_atom();
    const auto dp_grid = linspace(-two_pi * 40e6, two_pi * 40e6, 81);  // symmetric, odd
    const std::vector<double> oc_grid = {two_pi * 10e6, two_pi * 44e6, two_pi * 80e6};
    const SweepResult map =
        sweep_map(atom, DriveSpec{}, dp_grid, oc_grid, SweepMode::weak_probe_analytic);

    const std::size_t n = dp_grid.size();
    for (std::size_t row = 0; row < oc_grid.size(); ++row) {
        for (std::size_t i = 0; i < n; ++i) {
            const double left = map.points[row * n + i].value.T;
            const double right = map.points[row * n + (n - 1 - i)].value.T;
            CHECK(std::abs(left - right) < 1e-9);
        }
    }
}

TEST_CASE("dip separation approaches the control Rabi amplitude at strong drive") {
    const AtomSpec atom = device_atom();
    const double omega_c = two_pi * 100e6;
    const auto dp_grid = linspace(-1.5 * omega_c, 1.5 * omega_c, 1501);
    DriveSpec base;
    base.omega_c_rabi = omega_c;
    const SweepResult sweep = sweep_probe(atom, base, dp_grid, SweepMode::weak_probe_analytic);
    const auto split = dip_splitting(sweep);
    REQUIRE(split.has_value());
    CHECK(std::abs(split->separation() - omega_c) / omega_c < 0.10);
}

TEST_CASE("extinction curve: resonance values, monotonicity, ideal companion") {
    const AtomSpec atom = device_atom();
    const auto oc_grid = linspace(0.0, two_pi * 100e6, 201);
    const SweepResult curve = extinction_curve(atom, oc_grid);

    REQUIRE(curve.points.size() == oc_grid.size());
    CHECK(curve.points.front().value.T == doctest::Approx(0.0544444).epsilon(2e-5));
    const auto it44 = std::min_element(
        curve.points.begin(), curve.points.end(), [](const auto& a, const auto& b) {
            return std::abs(a.axis1 - two_pi * 44e6) < std::abs(b.axis1 - two_pi * 44e6);
        });
    CHECK(it44->value.T == doctest::Approx(0.864).epsilon(4e-3));

    double previous = -1.0;
    for (const auto& p : curve.points) {
        CHECK(p.value.T >= previous);
        previous = p.value.T;
    }
    REQUIRE(curve.ideal_T.size() == oc_grid.size());
    CHECK(curve.ideal_T.front() == 0.0);
    CHECK(curve.ideal_T.back() < curve.points.back().value.T);
}

TEST_CASE("contrast: device curve lands between 0.90 and 0.96") {
    const AtomSpec atom = device_atom();
    const auto oc_grid = linspace(0.0, two_pi * 100e6, 201);
    const double c = contrast(extinction_curve(atom, oc_grid));
    CHECK(c >= 0.90);
    CHECK(c <= 0.96);
}

TEST_CASE("contrast: constant sweep gives zero, ideal curve gives one") {
    const std::vector<double> constant(17, 0.42);
    CHECK(contrast(std::span<const double>(constant)) == 0.0);

    // Ideal curve from a grid that includes the perfect mirror point.
    std::vector<double> ideal;
    for (const double oc : linspace(0.0, two_pi * 500e6, 101)) {
        ideal.push_back(oc == 0.0 ? 0.0 : power_transmission_ideal(oc, 6.9e7, 4.3e7));
    }
    CHECK(contrast(std::span<const double>(ideal)) == 1.0);

    CHECK_THROWS_AS((void)contrast(std::span<const double>()), EmptySweep);
}

TEST_CASE("dip_splitting: control off reports no split") {
    const AtomSpec atom = device_atom();
    const auto grid = linspace(-two_pi * 50e6, two_pi * 50e6, 201);
    const SweepResult sweep =
        sweep_probe(atom, DriveSpec{}, grid, SweepMode::weak_probe_analytic);
    CHECK(dip_splitting(sweep) == std::nullopt);
}

TEST_CASE("dip_splitting matches the brute-force oracle at 44 and 100 MHz") {
    const AtomSpec atom = device_atom();
    for (const double mhz : {44.0, 100.0}) {
        const double omega_c = two_pi * mhz * 1e6;
        DriveSpec base;
        base.omega_c_rabi = omega_c;
        const auto grid = linspace(-1.5 * omega_c, 1.5 * omega_c, 801);
        const SweepResult sweep =
            sweep_probe(atom, base, grid, SweepMode::weak_probe_analytic);
        const auto split = dip_splitting(sweep);
        REQUIRE(split.has_value());

        const auto oracle = brute_force_minima(atom, base, 1.5 * omega_c, 60001);
        REQUIRE(oracle.size() == 2);
        const double oracle_sep = oracle.back() - oracle.front();
        CHECK(std::abs(split->separation() - oracle_sep) / oracle_sep < 1e-3);

        const double tolerance = (mhz == 44.0) ? 0.15 : 0.05;
        CHECK(std::abs(split->separation() - omega_c) / omega_c < tolerance);
    }
}

TEST_CASE("dip_splitting: minima too close for the grid raise GridTooCoarse") {
    SweepResult synthetic;
    synthetic.grid.axis1_name = "delta_p";
    synthetic.grid.axis1 = {-2e6, -1e6, 0.0, 1e6, 2e6};
    const double t_power[] = {1.0, 0.2, 0.5, 0.2, 1.0};
    for (std::size_t i = 0; i < 5; ++i) {
        SweepPoint p;
        p.axis1 = synthetic.grid.axis1[i];
        p.ok = true;
        p.value = scattering_point_from_t(std::sqrt(t_power[i]));
        synthetic.points.push_back(p);
    }
    CHECK_THROWS_AS((void)dip_splitting(synthetic), GridTooCoarse);

    // A grid too coarse to resolve the window at all hides the second dip.
    const AtomSpec atom = device_atom();
    DriveSpec base;
    base.omega_c_rabi = two_pi * 44e6;
    const auto grid = linspace(-two_pi * 400e6, two_pi * 400e6, 9);
    const SweepResult sweep = sweep_probe(atom, base, grid, SweepMode::weak_probe_analytic);
    CHECK(dip_splitting(sweep) == std::nullopt);
}

TEST_CASE("extinction slice of the map equals the extinction curve") {
    const AtomSpec atom = device_atom();
    const auto oc_grid = linspace(two_pi * 1e6, two_pi * 80e6, 41);
    const std::vector<double> dp_grid = {-1e6, 0.0, 1e6};
    const SweepResult map =
        sweep_map(atom, DriveSpec{}, dp_grid, oc_grid, SweepMode::weak_probe_analytic);
    const SweepResult curve = extinction_curve(atom, oc_grid);

    for (std::size_t row = 0; row < oc_grid.size(); ++row) {
        const SweepPoint& map_point = map.points[row * dp_grid.size() + 1];  // delta_p = 0
        CHECK(map_point.value.t == curve.points[row].value.t);
    }
}

TEST_CASE("poisoned points are recorded, not fatal") {
    AtomSpec atom = device_atom();
    atom.gamma_deph_31 = 0.0;  // two-photon pole at delta_p = 0
    DriveSpec base;
    base.omega_c_rabi = two_pi * 10e6;
    const std::vector<double> grid = {-1e6, 0.0, 1e6};
    const SweepResult sweep = sweep_probe(atom, base, grid, SweepMode::weak_probe_analytic);
    CHECK(sweep.points[0].ok);
    CHECK(!sweep.points[1].ok);
    CHECK(sweep.points[1].error.find("DegenerateDenominator") != std::string::npos);
    CHECK(sweep.points[2].ok);
}
