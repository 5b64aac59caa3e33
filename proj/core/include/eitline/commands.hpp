#pragma once

#include <iosfwd>

#include "eitline/config.hpp"
#include "eitline/csv_io.hpp"

namespace eitline {

/// CLI subcommand bodies. Every emitted stream starts with '#' comment
/// lines echoing the resolved configuration; data formatting is fixed at 12
/// significant digits so outputs are byte-identical across runs.

/// Probe sweep; one curve per [grid] omega_c_ladder entry (or the single
/// [drive] control amplitude). Columns: delta_p_over_2pi_hz, re_t, im_t, T.
void cmd_spectrum(const RunConfig& config, std::ostream& csv);

/// 2D power-transmission map, long format:
/// omega_c_over_2pi_hz, delta_p_over_2pi_hz, T.
void cmd_map(const RunConfig& config, std::ostream& csv);

/// Resonant extinction curve with the ideal companion column; appends the
/// contrast as a trailing comment and writes a one-line summary.
void cmd_extinction(const RunConfig& config, std::ostream& csv, std::ostream& summary);

/// Population/coherence time series from the configured initial state.
/// Columns: time_s, rho11, rho22, rho33, abs_rho21.
void cmd_evolve(const RunConfig& config, std::ostream& csv);

/// Line-shape fit of a trace; human-readable report followed by a
/// machine-readable key=value block.
void cmd_fit(const RunConfig& config, const Trace& trace, std::ostream& report);

/// Derived quantities: coupling<->rate relation, radiative-bound margins,
/// defaulted-rate disclosure.
void cmd_atom_info(const RunConfig& config, std::ostream& out);

}  // namespace eitline
