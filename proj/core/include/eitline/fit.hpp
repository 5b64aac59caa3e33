#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "eitline/atom_model.hpp"

namespace eitline {

/// Measured (or synthetic) transmission trace. When `magnitude_only` is
/// set the imaginary parts are ignored and fits run on |t| residuals;
/// otherwise real and imaginary parts enter as stacked residuals.
struct Trace {
    std::vector<double> delta_p;            // rad/s, strictly increasing, >= 8 samples
    std::vector<std::complex<double>> t;    // complex samples (or |t| in the real part)
    std::vector<double> weight;             // optional per-point weights; empty = uniform
    bool magnitude_only = false;
};

struct FitEstimate {
    double value = 0.0;
    double sigma = 0.0;  // local quadratic estimate
};

struct FitReport {
    FitEstimate gamma_rel_21;
    FitEstimate gamma_deph_21;
    FitEstimate center_offset;                // rad/s
    std::optional<FitEstimate> gamma_deph_31;  // EIT fit only
    std::optional<FitEstimate> omega_c_rabi;   // EIT fit only
    double residual_norm = 0.0;
    double gradient_norm = 0.0;  // max cosine between residual and Jacobian columns
    int iterations = 0;
    bool converged = false;
    bool identifiability_warning = false;
    std::string residual_domain;  // "complex" or "magnitude"
    std::string model;            // "two_level" or "eit"
};

/// Least-squares fit of the control-off line shape
///   t = 1 - Gamma_21 / (2 (gamma_21 - i (dp - d0)))
/// for {Gamma_21, gamma_21, d0}. Damped Gauss-Newton with analytic
/// Jacobian; initialization from the dip geometry (half-width, depth,
/// argmin). NotConverged is reported through the flag, never thrown.
FitReport fit_two_level(const Trace& trace);

struct KnownRates {
    double gamma_rel_21 = 0.0;
    double gamma_deph_21 = 0.0;
};

/// Fit of {gamma_31, Omega_c, d0} in the full weak-probe line shape with
/// the probe-transition pair held fixed. Sets identifiability_warning when
/// the fitted window is too shallow (Omega_c < gamma_31 / 2).
FitReport fit_eit(const Trace& trace, const KnownRates& known);

}  // namespace eitline
