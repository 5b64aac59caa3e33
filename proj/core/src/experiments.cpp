#include "eitline/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "eitline/errors.hpp"
#include "eitline/version.hpp"

namespace eitline {

namespace {

void check_grid(const std::vector<double>& values, const char* name) {
    if (values.empty()) {
        throw std::invalid_argument(std::string(name) + ": grid must be nonempty");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw std::invalid_argument(std::string(name) + ": grid must be strictly increasing");
        }
    }
}

// Disjoint index writes keep the result independent of the worker count.
void for_each_index(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned count = std::min<unsigned>(workers, std::thread::hardware_concurrency() > 0
                                                           ? std::thread::hardware_concurrency()
                                                           : 2u);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(count);
    for (unsigned w = 0; w < count; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < n; i += count) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

SweepPoint evaluate_point(const AtomSpec& atom, const DriveSpec& drive, SweepMode mode,
                          double axis1, double axis2) {
    SweepPoint p;
    p.axis1 = axis1;
    p.axis2 = axis2;
    try {
        p.value = (mode == SweepMode::weak_probe_analytic) ? transmission_weak_probe(atom, drive)
                                                           : transmission_numeric(atom, drive);
        p.ok = true;
    } catch (const Error& e) {
        p.error = e.code() + ": " + e.what();
    }
    return p;
}

// Vertex of the parabola through three points; falls back to the middle
// abscissa when the points are collinear.
double parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (den == 0.0) return x1;
    return x1 - 0.5 * num / den;
}

}  // namespace

const char* to_string(SweepMode mode) {
    return mode == SweepMode::weak_probe_analytic ? "analytic" : "numeric";
}

SweepResult sweep_probe(const AtomSpec& atom, const DriveSpec& base_drive,
                        const std::vector<double>& delta_p_grid, SweepMode mode,
                        unsigned workers) {
    check_grid(delta_p_grid, "delta_p_grid");

    SweepResult result;
    result.grid = {"delta_p", delta_p_grid, "", {}, mode};
    result.atom = atom;
    result.base_drive = base_drive;
    result.code_version = version;
    result.points.resize(delta_p_grid.size());

    for_each_index(delta_p_grid.size(), workers, [&](std::size_t i) {
        DriveSpec d = base_drive;
        d.delta_p = delta_p_grid[i];
        result.points[i] = evaluate_point(atom, d, mode, delta_p_grid[i], 0.0);
    });
    return result;
}

SweepResult sweep_map(const AtomSpec& atom, const DriveSpec& base_drive,
                      const std::vector<double>& delta_p_grid,
                      const std::vector<double>& omega_c_grid, SweepMode mode, unsigned workers) {
    check_grid(delta_p_grid, "delta_p_grid");
    check_grid(omega_c_grid, "omega_c_grid");

    SweepResult result;
    result.grid = {"delta_p", delta_p_grid, "omega_c_rabi", omega_c_grid, mode};
    result.atom = atom;
    result.base_drive = base_drive;
    result.code_version = version;
    result.points.resize(delta_p_grid.size() * omega_c_grid.size());

    const std::size_t inner = delta_p_grid.size();
    for_each_index(result.points.size(), workers, [&](std::size_t idx) {
        const std::size_t i2 = idx / inner;
        const std::size_t i1 = idx % inner;
        DriveSpec d = base_drive;
        d.delta_p = delta_p_grid[i1];
        d.omega_c_rabi = omega_c_grid[i2];
        result.points[idx] = evaluate_point(atom, d, mode, delta_p_grid[i1], omega_c_grid[i2]);
    });
    return result;
}

SweepResult extinction_curve(const AtomSpec& atom, const std::vector<double>& omega_c_grid,
                             SweepMode mode, const DriveSpec& base_drive, unsigned workers) {
    check_grid(omega_c_grid, "omega_c_grid");

    SweepResult result;
    result.grid = {"omega_c_rabi", omega_c_grid, "", {}, mode};
    result.atom = atom;
    result.base_drive = base_drive;
    result.base_drive.delta_p = 0.0;
    result.base_drive.delta_c = 0.0;
    result.code_version = version;
    result.points.resize(omega_c_grid.size());
    result.ideal_T.assign(omega_c_grid.size(), std::numeric_limits<double>::quiet_NaN());

    for_each_index(omega_c_grid.size(), workers, [&](std::size_t i) {
        DriveSpec d = result.base_drive;
        d.omega_c_rabi = omega_c_grid[i];
        result.points[i] = evaluate_point(atom, d, mode, omega_c_grid[i], 0.0);
        try {
            result.ideal_T[i] =
                power_transmission_ideal(omega_c_grid[i], atom.gamma_rel_21, atom.gamma_deph_31);
        } catch (const Error&) {
            // companion curve undefined at this point; NaN already in place
        }
    });
    return result;
}

double contrast(std::span<const double> transmission) {
    if (transmission.empty()) {
        throw EmptySweep("contrast of an empty sweep");
    }
    const auto [min_it, max_it] = std::minmax_element(transmission.begin(), transmission.end());
    if (!(*max_it > 0.0)) return 0.0;
    return (*max_it - *min_it) / *max_it;
}

double contrast(const SweepResult& result) {
    std::vector<double> values;
    values.reserve(result.points.size());
    for (const auto& p : result.points) {
        if (p.ok) values.push_back(p.value.T);
    }
    if (values.empty()) {
        throw EmptySweep("contrast: sweep has no valid points");
    }
    return contrast(std::span<const double>(values));
}

std::optional<SplitDips> dip_splitting(const SweepResult& result) {
    const std::vector<double>& x = result.grid.axis1;
    if (x.size() < 5 || !result.grid.axis2.empty()) {
        throw std::invalid_argument("dip_splitting expects a 1D probe sweep of >= 5 points");
    }

    std::vector<double> t_power(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        t_power[i] = result.points[i].ok ? result.points[i].value.T
                                         : std::numeric_limits<double>::infinity();
    }

    // Interior strict local minima; an exact-tie plateau counts once, at its
    // center, and skips parabolic refinement.
    struct Minimum {
        std::size_t index;
        double position;
        double depth;
    };
    std::vector<Minimum> minima;
    std::size_t i = 1;
    while (i + 1 < x.size()) {
        std::size_t j = i;
        while (j + 1 < x.size() && t_power[j + 1] == t_power[i]) ++j;
        const bool falls = t_power[i] < t_power[i - 1];
        const bool rises = (j + 1 < x.size()) && t_power[j] < t_power[j + 1];
        if (falls && rises) {
            if (j == i) {
                const double pos = parabolic_vertex(x[i - 1], t_power[i - 1], x[i], t_power[i],
                                                    x[i + 1], t_power[i + 1]);
                minima.push_back({i, pos, t_power[i]});
            } else {
                minima.push_back({(i + j) / 2, 0.5 * (x[i] + x[j]), t_power[i]});
            }
        }
        i = j + 1;
    }

    if (minima.size() < 2) {
        return std::nullopt;
    }
    // Two deepest dips, reported in position order.
    std::sort(minima.begin(), minima.end(),
              [](const Minimum& a, const Minimum& b) { return a.depth < b.depth; });
    Minimum first = minima[0];
    Minimum second = minima[1];
    if (first.index > second.index) std::swap(first, second);

    if (second.index - first.index <= 2) {
        throw GridTooCoarse("transmission minima within 2 grid steps; refine the detuning grid");
    }
    return SplitDips{first.position, second.position};
}

}  // namespace eitline
