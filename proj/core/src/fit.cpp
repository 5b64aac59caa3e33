#include "eitline/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "eitline/errors.hpp"

namespace eitline {

namespace {

using Complex = std::complex<double>;
constexpr Complex i_unit(0.0, 1.0);
constexpr int n_params = 3;
using Params = std::array<double, n_params>;

struct ModelValue {
    Complex t;
    std::array<Complex, n_params> dt;  // derivative w.r.t. each parameter
};

// t = 1 - G / D, D = 2 (g - i (dp - d0)); parameters {G, g, d0}.
struct TwoLevelModel {
    ModelValue operator()(double dp, const Params& p) const {
        const double gamma_rel = p[0];
        const double gamma_deph = p[1];
        const Complex d = 2.0 * (gamma_deph - i_unit * (dp - p[2]));
        const Complex d2 = d * d;
        ModelValue v;
        v.t = 1.0 - gamma_rel / d;
        v.dt[0] = -1.0 / d;
        v.dt[1] = 2.0 * gamma_rel / d2;
        v.dt[2] = 2.0 * i_unit * gamma_rel / d2;
        return v;
    }
    static bool admissible(const Params& p) { return p[0] >= 0.0 && p[1] > 0.0; }
};

// Full weak-probe line shape with {Gamma_21, gamma_21} fixed;
// parameters {gamma_31, Omega_c, d0}.
struct EitModel {
    double gamma_rel_21;
    double gamma_deph_21;

    ModelValue operator()(double dp, const Params& p) const {
        const double gamma31 = p[0];
        const double omega_c = p[1];
        const Complex delta(0.0, dp - p[2]);  // i * detuning from center
        const Complex g = gamma31 - delta;
        const Complex d = 2.0 * (gamma_deph_21 - delta) + omega_c * omega_c / (2.0 * g);
        const Complex d2 = d * d;
        ModelValue v;
        v.t = 1.0 - gamma_rel_21 / d;
        const Complex common = gamma_rel_21 / d2;
        v.dt[0] = common * (-omega_c * omega_c / (2.0 * g * g));
        v.dt[1] = common * (omega_c / g);
        v.dt[2] = common * (2.0 * i_unit - i_unit * omega_c * omega_c / (2.0 * g * g));
        return v;
    }
    static bool admissible(const Params& p) { return p[0] > 0.0 && p[1] >= 0.0; }
};

void check_trace(const Trace& trace) {
    const std::size_t n = trace.delta_p.size();
    if (n < 8) {
        throw BadTrace("trace needs at least 8 samples");
    }
    if (trace.t.size() != n) {
        throw BadTrace("detuning and sample arrays differ in length");
    }
    if (!trace.weight.empty() && trace.weight.size() != n) {
        throw BadTrace("weight array length mismatch");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(trace.delta_p[k]) || !std::isfinite(trace.t[k].real()) ||
            !std::isfinite(trace.t[k].imag())) {
            throw BadTrace("non-finite trace entry");
        }
        if (k > 0 && !(trace.delta_p[k] > trace.delta_p[k - 1])) {
            throw BadTrace("detunings must be strictly increasing");
        }
    }
    if (!trace.weight.empty()) {
        double sum = 0.0;
        for (double w : trace.weight) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                throw BadTrace("weights must be finite and non-negative");
            }
            sum += w;
        }
        if (sum == 0.0) {
            throw BadTrace("weights are all zero");
        }
    }
}

struct LmOutcome {
    Params p{};
    double residual_norm = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::array<double, n_params> sigma{};
};

template <typename Model>
void fill_residuals(const Model& model, const Trace& trace, const Params& p, Eigen::VectorXd& r,
                    Eigen::MatrixXd* jac) {
    const std::size_t n = trace.delta_p.size();
    const bool complex_domain = !trace.magnitude_only;
    for (std::size_t k = 0; k < n; ++k) {
        const double w = trace.weight.empty() ? 1.0 : trace.weight[k];
        const ModelValue v = model(trace.delta_p[k], p);
        if (complex_domain) {
            const Complex diff = v.t - trace.t[k];
            r(2 * k) = w * diff.real();
            r(2 * k + 1) = w * diff.imag();
            if (jac) {
                for (int j = 0; j < n_params; ++j) {
                    (*jac)(2 * k, j) = w * v.dt[j].real();
                    (*jac)(2 * k + 1, j) = w * v.dt[j].imag();
                }
            }
        } else {
            const double model_abs = std::abs(v.t);
            r(k) = w * (model_abs - std::abs(trace.t[k]));
            if (jac) {
                for (int j = 0; j < n_params; ++j) {
                    (*jac)(k, j) = model_abs > 0.0
                                       ? w * (std::conj(v.t) * v.dt[j]).real() / model_abs
                                       : 0.0;
                }
            }
        }
    }
}

// Damped Gauss-Newton: damping multiplied/divided by 3 on reject/accept.
// Convergence by perfect fit, by the residual-Jacobian cosine test, or by a
// vanishing relative step.
template <typename Model>
LmOutcome lm_solve(const Model& model, const Trace& trace, const Params& p0,
                   const Params& scale) {
    const std::size_t n = trace.delta_p.size();
    const int m = static_cast<int>(trace.magnitude_only ? n : 2 * n);

    Eigen::VectorXd r(m);
    Eigen::MatrixXd jac(m, n_params);

    LmOutcome out;
    out.p = p0;
    fill_residuals(model, trace, out.p, r, &jac);
    double f = r.squaredNorm();

    const double perfect = 1e-28 * m;
    double lambda = 1e-3;
    Eigen::VectorXd r_try(m);

    auto cosine_norm = [&](const Eigen::VectorXd& res) {
        const double rnorm = res.norm();
        if (rnorm == 0.0) return 0.0;
        double worst = 0.0;
        for (int j = 0; j < n_params; ++j) {
            const double cnorm = jac.col(j).norm();
            if (cnorm > 0.0) {
                worst = std::max(worst, std::abs(jac.col(j).dot(res)) / (cnorm * rnorm));
            }
        }
        return worst;
    };

    for (out.iterations = 0; out.iterations < 200; ++out.iterations) {
        if (f <= perfect) {
            out.converged = true;
            break;
        }
        const Eigen::Matrix3d normal = jac.transpose() * jac;
        const Eigen::Vector3d grad = jac.transpose() * r;
        out.gradient_norm = cosine_norm(r);
        if (out.gradient_norm < 1e-8) {
            out.converged = true;
            break;
        }

        Eigen::Matrix3d damped = normal;
        for (int j = 0; j < n_params; ++j) {
            damped(j, j) += lambda * std::max(normal(j, j), 1e-30);
        }
        const Eigen::Vector3d step = damped.ldlt().solve(-grad);

        Params p_try = out.p;
        for (int j = 0; j < n_params; ++j) p_try[j] += step(j);
        double rel_step = 0.0;
        for (int j = 0; j < n_params; ++j) {
            rel_step = std::max(rel_step,
                                std::abs(step(j)) / std::max(std::abs(out.p[j]), scale[j]));
        }

        bool accepted = false;
        if (Model::admissible(p_try)) {
            fill_residuals(model, trace, p_try, r_try, nullptr);
            const double f_try = r_try.squaredNorm();
            if (f_try < f) {
                out.p = p_try;
                f = f_try;
                fill_residuals(model, trace, out.p, r, &jac);
                lambda = std::max(lambda / 3.0, 1e-14);
                accepted = true;
            }
        }
        // The quadratic model is exhausted once the proposed step vanishes
        // on the parameter scale, whether or not it still improved f.
        if (rel_step < 1e-12) {
            out.converged = true;
            break;
        }
        if (!accepted) {
            lambda *= 3.0;
            if (lambda > 1e15) {
                break;  // stuck; return the best iterate un-converged
            }
        }
    }

    out.residual_norm = std::sqrt(f);
    out.gradient_norm = cosine_norm(r);
    if (f <= perfect || out.gradient_norm < 1e-8) {
        out.converged = true;
    }

    // Local quadratic uncertainty: diag of the inverse normal matrix scaled
    // by the residual variance.
    const Eigen::Matrix3d normal = jac.transpose() * jac;
    const double s2 = f / std::max(m - n_params, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(normal);
    const double eig_floor = 1e-14 * std::max(es.eigenvalues().maxCoeff(), 0.0);
    for (int j = 0; j < n_params; ++j) {
        double inv_jj = 0.0;
        bool defined = true;
        for (int e = 0; e < n_params; ++e) {
            const double ev = es.eigenvalues()(e);
            if (ev <= eig_floor) {
                defined = false;
                break;
            }
            const double u = es.eigenvectors()(j, e);
            inv_jj += u * u / ev;
        }
        out.sigma[j] = defined ? std::sqrt(inv_jj * s2)
                               : std::numeric_limits<double>::infinity();
    }
    return out;
}

std::size_t argmin_abs(const Trace& trace) {
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
        const double a = std::abs(trace.t[k]);
        if (a < best_val) {
            best_val = a;
            best = k;
        }
    }
    return best;
}

// Half-width of the |t| dip at half depth, scanning outward from the
// minimum. Falls back to a tenth of the span when the dip is degenerate.
double dip_half_width(const Trace& trace, std::size_t i_min, double t_min) {
    const double level = 0.5 * (1.0 + t_min);
    const double span = trace.delta_p.back() - trace.delta_p.front();
    double width_sum = 0.0;
    int sides = 0;

    const auto crossing = [&](std::size_t from, int dir) -> std::optional<double> {
        std::size_t k = from;
        while (true) {
            const std::size_t next = k + dir;
            if (next >= trace.t.size()) return std::nullopt;  // wraps for dir=-1 at 0
            const double a0 = std::abs(trace.t[k]);
            const double a1 = std::abs(trace.t[next]);
            if (a1 >= level) {
                const double frac = (a1 == a0) ? 1.0 : (level - a0) / (a1 - a0);
                return std::abs(trace.delta_p[next] - trace.delta_p[k]) * frac +
                       std::abs(trace.delta_p[k] - trace.delta_p[i_min]);
            }
            k = next;
        }
    };

    if (auto right = crossing(i_min, +1)) {
        width_sum += *right;
        ++sides;
    }
    if (i_min > 0) {
        if (auto left = crossing(i_min, -1)) {
            width_sum += *left;
            ++sides;
        }
    }
    if (sides == 0 || width_sum <= 0.0) {
        return span / 10.0;
    }
    return width_sum / sides;
}

FitReport report_from(const LmOutcome& out, const Trace& trace) {
    FitReport rep;
    rep.residual_norm = out.residual_norm;
    rep.gradient_norm = out.gradient_norm;
    rep.iterations = out.iterations;
    rep.converged = out.converged;
    rep.residual_domain = trace.magnitude_only ? "magnitude" : "complex";
    return rep;
}

}  // namespace

FitReport fit_two_level(const Trace& trace) {
    check_trace(trace);

    const std::size_t i_min = argmin_abs(trace);
    const double t_min = std::abs(trace.t[i_min]);
    const double depth = std::max(1.0 - t_min, 0.0);
    const double span = trace.delta_p.back() - trace.delta_p.front();

    Params p0;
    p0[2] = trace.delta_p[i_min];
    if (depth < 1e-9) {
        p0[1] = span / 10.0;
        p0[0] = 0.0;
    } else {
        p0[1] = dip_half_width(trace, i_min, t_min);
        p0[0] = 2.0 * p0[1] * depth;
    }
    const Params scale = {std::max(p0[0], p0[1]), p0[1], span / 10.0};

    const LmOutcome out = lm_solve(TwoLevelModel{}, trace, p0, scale);

    FitReport rep = report_from(out, trace);
    rep.model = "two_level";
    rep.gamma_rel_21 = {out.p[0], out.sigma[0]};
    rep.gamma_deph_21 = {out.p[1], out.sigma[1]};
    rep.center_offset = {out.p[2], out.sigma[2]};
    // No resolvable dip: flag rather than fail.
    if (out.p[0] < 1e-9 * out.p[1] || depth < 1e-9) {
        rep.identifiability_warning = true;
    }
    return rep;
}

FitReport fit_eit(const Trace& trace, const KnownRates& known) {
    check_trace(trace);
    if (!(known.gamma_rel_21 > 0.0) || !(known.gamma_deph_21 > 0.0)) {
        throw BadTrace("fit_eit requires positive known gamma_rel_21 and gamma_deph_21");
    }

    const std::size_t n = trace.delta_p.size();

    // Window center and control-amplitude seed from the dip geometry: use
    // the two deepest interior minima of |t| when the line is split.
    std::vector<std::size_t> minima;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double a = std::abs(trace.t[k]);
        if (a < std::abs(trace.t[k - 1]) && a < std::abs(trace.t[k + 1])) {
            minima.push_back(k);
        }
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(trace.t[a]) < std::abs(trace.t[b]);
    });

    Params p0;
    p0[0] = known.gamma_deph_21;  // gamma_31 comparable to gamma_21 as a seed
    if (minima.size() >= 2) {
        const double x1 = trace.delta_p[minima[0]];
        const double x2 = trace.delta_p[minima[1]];
        p0[2] = 0.5 * (x1 + x2);
        p0[1] = std::abs(x2 - x1);
    } else {
        const std::size_t i_min = argmin_abs(trace);
        p0[2] = trace.delta_p[i_min];
        p0[1] = 0.0;
    }
    if (p0[1] <= 0.0) {
        // Seed the window amplitude from the resonant recovery depth.
        std::size_t i_center = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::abs(trace.delta_p[k] - p0[2]);
            if (d < best) {
                best = d;
                i_center = k;
            }
        }
        const double t_center = std::abs(trace.t[i_center]);
        const double denom_est = known.gamma_rel_21 / std::max(1.0 - t_center, 1e-6);
        const double window = std::max(denom_est - 2.0 * known.gamma_deph_21, 0.0);
        p0[1] = std::sqrt(2.0 * p0[0] * window + 0.01 * known.gamma_deph_21 *
                                                     known.gamma_deph_21);
    }

    const EitModel model{known.gamma_rel_21, known.gamma_deph_21};
    const double span = trace.delta_p.back() - trace.delta_p.front();
    const Params scale = {known.gamma_deph_21, std::max(p0[1], known.gamma_deph_21),
                          span / 10.0};

    LmOutcome best = lm_solve(model, trace, p0, scale);
    if (!best.converged || best.residual_norm > 1e-10 * std::sqrt(static_cast<double>(n))) {
        // Deterministic multistart around the seed for hard line shapes.
        for (const double fg : {0.25, 4.0}) {
            for (const double fo : {0.5, 2.0}) {
                Params alt = p0;
                alt[0] *= fg;
                alt[1] = std::max(alt[1] * fo, 1e-3 * known.gamma_deph_21);
                const LmOutcome trial = lm_solve(model, trace, alt, scale);
                const bool better = (trial.converged && !best.converged) ||
                                    (trial.converged == best.converged &&
                                     trial.residual_norm < best.residual_norm);
                if (better) best = trial;
            }
        }
    }

    FitReport rep = report_from(best, trace);
    rep.model = "eit";
    rep.gamma_rel_21 = {known.gamma_rel_21, 0.0};
    rep.gamma_deph_21 = {known.gamma_deph_21, 0.0};
    rep.gamma_deph_31 = FitEstimate{best.p[0], best.sigma[0]};
    rep.omega_c_rabi = FitEstimate{best.p[1], best.sigma[1]};
    rep.center_offset = {best.p[2], best.sigma[2]};
    if (best.p[1] < 0.5 * best.p[0]) {
        rep.identifiability_warning = true;  // window too shallow to separate parameters
    }
    return rep;
}

}  // namespace eitline
