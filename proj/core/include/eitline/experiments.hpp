#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eitline/atom_model.hpp"
#include "eitline/scattering.hpp"

namespace eitline {

enum class SweepMode {
    weak_probe_analytic,  // closed-form weak-probe expression
    full_numeric,         // steady-state solve per point
};

const char* to_string(SweepMode mode);

struct SweepGrid {
    std::string axis1_name;
    std::vector<double> axis1;
    std::string axis2_name;      // empty for 1D sweeps
    std::vector<double> axis2;   // empty for 1D sweeps
    SweepMode mode = SweepMode::weak_probe_analytic;
};

/// One grid point. A point whose evaluation raised a domain error carries
/// the error text instead of aborting the sweep.
struct SweepPoint {
    double axis1 = 0.0;
    double axis2 = 0.0;
    ScatteringPoint value;
    bool ok = false;
    std::string error;
};

struct SweepResult {
    SweepGrid grid;
    AtomSpec atom;
    DriveSpec base_drive;
    std::string code_version;
    /// axis2-major: points[i2 * axis1.size() + i1]
    std::vector<SweepPoint> points;
    /// Companion ideal curve (filled by extinction_curve only).
    std::vector<double> ideal_T;
};

/// Probe-detuning sweep at fixed control amplitude. `workers` > 1 evaluates
/// points concurrently; values are bit-identical to the serial run.
SweepResult sweep_probe(const AtomSpec& atom, const DriveSpec& base_drive,
                        const std::vector<double>& delta_p_grid, SweepMode mode,
                        unsigned workers = 1);

/// 2D map over control amplitude (outer axis) and probe detuning (inner).
SweepResult sweep_map(const AtomSpec& atom, const DriveSpec& base_drive,
                      const std::vector<double>& delta_p_grid,
                      const std::vector<double>& omega_c_grid, SweepMode mode,
                      unsigned workers = 1);

/// Resonant power transmission vs control amplitude (delta_p = delta_c = 0
/// enforced), with the companion ideal curve alongside.
SweepResult extinction_curve(const AtomSpec& atom, const std::vector<double>& omega_c_grid,
                             SweepMode mode = SweepMode::weak_probe_analytic,
                             const DriveSpec& base_drive = {}, unsigned workers = 1);

/// (T_max - T_min) / T_max over the sweep; 0 for a constant sweep.
double contrast(const SweepResult& result);
double contrast(std::span<const double> transmission);

struct SplitDips {
    double lower = 0.0;  // rad/s
    double upper = 0.0;
    double separation() const { return upper - lower; }
};

/// Locates the two transmission minima of a probe sweep (discrete
/// neighborhood test plus 3-point parabolic refinement). Returns nullopt
/// when fewer than two interior minima exist; throws GridTooCoarse when the
/// minima sit within 2 grid steps of each other.
std::optional<SplitDips> dip_splitting(const SweepResult& result);

}  // namespace eitline
