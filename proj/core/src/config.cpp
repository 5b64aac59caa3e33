#include "eitline/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "eitline/csv_io.hpp"
#include "eitline/errors.hpp"
#include "eitline/version.hpp"

namespace eitline {

namespace {

constexpr double mhz_to_rad = two_pi * 1e6;

struct RawEntry {
    std::string value;
    int line = 0;
};

// section -> keys accepted there; `%` marks keys that also accept an `_mhz`
// twin (value/2pi in MHz).
const std::map<std::string, std::vector<std::string>> schema = {
    {"atom",
     {"%omega21", "%omega32", "%gamma_rel_21", "%gamma_rel_32", "%gamma_deph_21",
      "%gamma_deph_31", "%gamma_deph_32", "zeta_21", "zeta_32", "mutual_inductance",
      "persistent_current", "line_impedance"}},
    {"drive", {"%omega_p_rabi", "%omega_c_rabi", "%delta_p", "%delta_c"}},
    {"grid",
     {"%delta_p_min", "%delta_p_max", "delta_p_points", "%omega_c_min", "%omega_c_max",
      "omega_c_points", "%omega_c_ladder"}},
    {"run", {"mode", "seed", "workers", "out"}},
    {"evolve", {"t_final", "step", "initial", "samples"}},
    {"fit", {"model", "domain"}},
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
    std::ostringstream msg;
    msg << origin << ":" << line << ": " << message;
    throw ConfigError(msg.str());
}

bool key_allowed(const std::string& section, const std::string& key, bool* is_mhz_twin) {
    const auto it = schema.find(section);
    if (it == schema.end()) return false;
    for (const std::string& entry : it->second) {
        if (entry.front() == '%') {
            const std::string base = entry.substr(1);
            if (key == base) {
                *is_mhz_twin = false;
                return true;
            }
            if (key == base + "_mhz") {
                *is_mhz_twin = true;
                return true;
            }
        } else if (key == entry) {
            *is_mhz_twin = false;
            return true;
        }
    }
    return false;
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && text.front() == '+') ++begin;  // from_chars rejects leading '+'
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        fail(origin, line, "key '" + key + "': not a number: '" + text + "'");
    }
    return value;
}

long long parse_integer(const std::string& origin, int line, const std::string& key,
                        const std::string& text) {
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(origin, line, "key '" + key + "': not an integer: '" + text + "'");
    }
    return value;
}

class Entries {
public:
    Entries(std::map<std::string, RawEntry> entries, std::string origin)
        : entries_(std::move(entries)), origin_(std::move(origin)) {}

    // Scalar in rad/s from either the plain key or its _mhz twin.
    std::optional<double> frequency(const std::string& section, const std::string& key) {
        const auto plain = find(section, key);
        const auto mhz = find(section, key + "_mhz");
        if (plain && mhz) {
            fail(origin_, mhz->line,
                 "both '" + key + "' and '" + key + "_mhz' given in [" + section + "]");
        }
        if (plain) {
            return parse_double(origin_, plain->line, key, plain->value);
        }
        if (mhz) {
            return parse_double(origin_, mhz->line, key + "_mhz", mhz->value) * mhz_to_rad;
        }
        return std::nullopt;
    }

    double frequency_required(const std::string& section, const std::string& key) {
        const auto v = frequency(section, key);
        if (!v) {
            throw ConfigError(origin_ + ": [" + section + "] missing required key '" + key +
                              "' (or '" + key + "_mhz')");
        }
        return *v;
    }

    std::optional<double> number(const std::string& section, const std::string& key) {
        const auto e = find(section, key);
        if (!e) return std::nullopt;
        return parse_double(origin_, e->line, key, e->value);
    }

    std::optional<long long> integer(const std::string& section, const std::string& key) {
        const auto e = find(section, key);
        if (!e) return std::nullopt;
        return parse_integer(origin_, e->line, key, e->value);
    }

    std::optional<std::string> text(const std::string& section, const std::string& key) {
        const auto e = find(section, key);
        if (!e) return std::nullopt;
        return e->value;
    }

    std::optional<std::vector<double>> frequency_list(const std::string& section,
                                                      const std::string& key) {
        const auto plain = find(section, key);
        const auto mhz = find(section, key + "_mhz");
        if (plain && mhz) {
            fail(origin_, mhz->line,
                 "both '" + key + "' and '" + key + "_mhz' given in [" + section + "]");
        }
        const RawEntry* e = plain ? plain : mhz;
        if (!e) return std::nullopt;
        const double unit = plain ? 1.0 : mhz_to_rad;
        const std::string name = plain ? key : key + "_mhz";
        std::vector<double> values;
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            values.push_back(parse_double(origin_, e->line, name, trim(item)) * unit);
        }
        if (values.empty()) {
            fail(origin_, e->line, "key '" + name + "': empty list");
        }
        return values;
    }

    const std::string& origin() const { return origin_; }

    int line_of(const std::string& section, const std::string& key) const {
        const auto e = find(section, key);
        return e ? e->line : 0;
    }

private:
    const RawEntry* find(const std::string& section, const std::string& key) const {
        const auto it = entries_.find(section + "." + key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::map<std::string, RawEntry> entries_;
    std::string origin_;
};

Entries scan(const std::string& text, const std::string& origin) {
    std::map<std::string, RawEntry> entries;
    std::istringstream is(text);
    std::string raw_line;
    std::string section;
    int line = 0;
    while (std::getline(is, raw_line)) {
        ++line;
        std::string stripped = raw_line;
        if (const auto hash = stripped.find('#'); hash != std::string::npos) {
            stripped.erase(hash);
        }
        stripped = trim(stripped);
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                fail(origin, line, "malformed section header: '" + stripped + "'");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (schema.find(section) == schema.end()) {
                fail(origin, line, "unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail(origin, line, "expected 'key = value', got '" + stripped + "'");
        }
        if (section.empty()) {
            fail(origin, line, "key outside of any [section]");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(origin, line, "expected 'key = value', got '" + stripped + "'");
        }

        bool is_mhz = false;
        if (!key_allowed(section, key, &is_mhz)) {
            fail(origin, line, "unknown key '" + key + "' in section [" + section + "]");
        }
        const auto [it, inserted] = entries.emplace(section + "." + key, RawEntry{value, line});
        if (!inserted) {
            fail(origin, line,
                 "duplicate key '" + key + "' in section [" + section + "] (first at line " +
                     std::to_string(it->second.line) + ")");
        }
    }
    return Entries(std::move(entries), origin);
}

std::vector<double> linear_grid(double lo, double hi, long long points, const std::string& origin,
                                const std::string& name) {
    if (points < 1) {
        throw ConfigError(origin + ": " + name + "_points must be >= 1");
    }
    if (points > 10'000'000) {
        throw ConfigError(origin + ": " + name + "_points exceeds the 1e7 sanity cap");
    }
    if (points == 1) {
        return {lo};
    }
    if (!(hi > lo)) {
        throw ConfigError(origin + ": " + name + "_max must exceed " + name + "_min");
    }
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (long long i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return grid;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    Entries e = scan(text, origin);
    RunConfig cfg;
    cfg.source = origin;

    // [atom]
    cfg.atom.omega21 = e.frequency_required("atom", "omega21");
    cfg.atom.omega32 = e.frequency_required("atom", "omega32");
    cfg.atom.gamma_rel_21 = e.frequency_required("atom", "gamma_rel_21");
    cfg.atom.gamma_deph_21 = e.frequency_required("atom", "gamma_deph_21");
    cfg.atom.gamma_deph_31 = e.frequency_required("atom", "gamma_deph_31");
    if (const auto v = e.frequency("atom", "gamma_rel_32")) {
        cfg.atom.gamma_rel_32 = *v;
    } else {
        cfg.atom.gamma_rel_32 = default_gamma_rel_32(cfg.atom);
        cfg.gamma_rel_32_defaulted = true;
    }
    if (const auto v = e.frequency("atom", "gamma_deph_32")) {
        cfg.atom.gamma_deph_32 = *v;
    } else {
        cfg.atom.gamma_deph_32 = default_gamma_deph_32(cfg.atom);
        cfg.gamma_deph_32_defaulted = true;
    }
    cfg.atom.zeta_21 = e.number("atom", "zeta_21").value_or(1.0);
    cfg.atom.zeta_32 = e.number("atom", "zeta_32").value_or(1.0);
    cfg.atom.mutual_inductance = e.number("atom", "mutual_inductance").value_or(0.0);
    cfg.atom.persistent_current = e.number("atom", "persistent_current").value_or(0.0);
    cfg.atom.line_impedance = e.number("atom", "line_impedance").value_or(50.0);

    // [drive]
    cfg.drive.omega_p_rabi = e.frequency("drive", "omega_p_rabi").value_or(0.0);
    cfg.drive.omega_c_rabi = e.frequency("drive", "omega_c_rabi").value_or(0.0);
    cfg.drive.delta_p = e.frequency("drive", "delta_p").value_or(0.0);
    cfg.drive.delta_c = e.frequency("drive", "delta_c").value_or(0.0);

    // [grid]
    const auto dp_min = e.frequency("grid", "delta_p_min");
    const auto dp_max = e.frequency("grid", "delta_p_max");
    const auto dp_points = e.integer("grid", "delta_p_points");
    if (dp_min || dp_max || dp_points) {
        if (!(dp_min && dp_max && dp_points)) {
            throw ConfigError(origin +
                              ": [grid] delta_p_min/_max/_points must be given together");
        }
        cfg.delta_p_grid = linear_grid(*dp_min, *dp_max, *dp_points, origin, "delta_p");
    }
    const auto oc_min = e.frequency("grid", "omega_c_min");
    const auto oc_max = e.frequency("grid", "omega_c_max");
    const auto oc_points = e.integer("grid", "omega_c_points");
    if (oc_min || oc_max || oc_points) {
        if (!(oc_min && oc_max && oc_points)) {
            throw ConfigError(origin +
                              ": [grid] omega_c_min/_max/_points must be given together");
        }
        cfg.omega_c_grid = linear_grid(*oc_min, *oc_max, *oc_points, origin, "omega_c");
    }
    if (const auto ladder = e.frequency_list("grid", "omega_c_ladder")) {
        cfg.omega_c_ladder = *ladder;
        for (std::size_t i = 0; i < cfg.omega_c_ladder.size(); ++i) {
            if (cfg.omega_c_ladder[i] < 0.0 ||
                (i > 0 && cfg.omega_c_ladder[i] <= cfg.omega_c_ladder[i - 1])) {
                fail(origin, e.line_of("grid", "omega_c_ladder"),
                     "omega_c_ladder must be non-negative and strictly increasing");
            }
        }
    }

    // [run]
    if (const auto mode = e.text("run", "mode")) {
        if (*mode == "analytic") {
            cfg.mode = SweepMode::weak_probe_analytic;
        } else if (*mode == "numeric") {
            cfg.mode = SweepMode::full_numeric;
        } else {
            fail(origin, e.line_of("run", "mode"),
                 "mode must be 'analytic' or 'numeric', got '" + *mode + "'");
        }
    }
    if (const auto seed = e.integer("run", "seed")) {
        if (*seed < 0) fail(origin, e.line_of("run", "seed"), "seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(*seed);
    }
    if (const auto workers = e.integer("run", "workers")) {
        if (*workers < 1) fail(origin, e.line_of("run", "workers"), "workers must be >= 1");
        cfg.workers = static_cast<unsigned>(*workers);
    }
    cfg.out_path = e.text("run", "out").value_or("");

    // [evolve]
    cfg.evolve_t_final = e.number("evolve", "t_final").value_or(0.0);
    cfg.evolve_step = e.number("evolve", "step").value_or(0.0);
    cfg.evolve_initial = e.text("evolve", "initial").value_or("ground");
    if (cfg.evolve_initial != "ground" && cfg.evolve_initial != "level2" &&
        cfg.evolve_initial != "level3") {
        fail(origin, e.line_of("evolve", "initial"),
             "initial must be one of ground|level2|level3");
    }
    if (const auto samples = e.integer("evolve", "samples")) {
        if (*samples < 2) fail(origin, e.line_of("evolve", "samples"), "samples must be >= 2");
        cfg.evolve_samples = static_cast<int>(*samples);
    }

    // [fit]
    if (const auto model = e.text("fit", "model")) {
        if (*model == "two_level") {
            cfg.fit_model = FitModel::two_level;
        } else if (*model == "eit") {
            cfg.fit_model = FitModel::eit;
        } else {
            fail(origin, e.line_of("fit", "model"),
                 "fit model must be 'two_level' or 'eit', got '" + *model + "'");
        }
    }
    if (const auto domain = e.text("fit", "domain")) {
        if (*domain == "complex") {
            cfg.fit_domain = FitDomain::complex_t;
        } else if (*domain == "magnitude") {
            cfg.fit_domain = FitDomain::magnitude;
        } else {
            fail(origin, e.line_of("fit", "domain"),
                 "fit domain must be 'complex' or 'magnitude', got '" + *domain + "'");
        }
    }

    // Resolved records must satisfy the module-level invariants.
    std::string problems;
    for (const Violation& v : validate_atom(cfg.atom)) {
        problems += " [atom]." + v.field + ": " + v.message + ";";
    }
    for (const Violation& v : validate_drive(cfg.drive)) {
        problems += " [drive]." + v.field + ": " + v.message + ";";
    }
    if (!problems.empty()) {
        throw ConfigError(origin + ": invalid physical parameters:" + problems);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading config file: " + path);
    }
    return parse_config_text(buffer.str(), path);
}

std::vector<std::string> echo_config(const RunConfig& config) {
    std::vector<std::string> lines;
    const auto add = [&lines](const std::string& s) { lines.push_back(s); };
    const auto num = [](double v) { return format_g12(v); };

    add(std::string("eitline ") + version);
    const std::string origin = config.source.empty()
                                   ? std::string("<inline>")
                                   : std::filesystem::path(config.source).filename().string();
    add("config = " + origin);
    add("[atom]");
    add("omega21 = " + num(config.atom.omega21));
    add("omega32 = " + num(config.atom.omega32));
    add("gamma_rel_21 = " + num(config.atom.gamma_rel_21));
    add("gamma_rel_32 = " + num(config.atom.gamma_rel_32) +
        (config.gamma_rel_32_defaulted ? "  (defaulted: 2*gamma_rel_21)" : ""));
    add("gamma_deph_21 = " + num(config.atom.gamma_deph_21));
    add("gamma_deph_31 = " + num(config.atom.gamma_deph_31));
    add("gamma_deph_32 = " + num(config.atom.gamma_deph_32) +
        (config.gamma_deph_32_defaulted ? "  (defaulted: additive dephasing, clamped)" : ""));
    add("zeta_21 = " + num(config.atom.zeta_21));
    add("zeta_32 = " + num(config.atom.zeta_32));
    add("mutual_inductance = " + num(config.atom.mutual_inductance));
    add("persistent_current = " + num(config.atom.persistent_current));
    add("line_impedance = " + num(config.atom.line_impedance));
    add("[drive]");
    add("omega_p_rabi = " + num(config.drive.omega_p_rabi));
    add("omega_c_rabi = " + num(config.drive.omega_c_rabi));
    add("delta_p = " + num(config.drive.delta_p));
    add("delta_c = " + num(config.drive.delta_c));
    add("[grid]");
    const auto grid_line = [&](const char* name, const std::vector<double>& g) {
        if (g.empty()) {
            add(std::string(name) + " = (none)");
        } else {
            add(std::string(name) + " = " + num(g.front()) + " .. " + num(g.back()) + " (" +
                std::to_string(g.size()) + " points)");
        }
    };
    grid_line("delta_p", config.delta_p_grid);
    grid_line("omega_c", config.omega_c_grid);
    if (!config.omega_c_ladder.empty()) {
        std::string ladder = "omega_c_ladder =";
        for (double v : config.omega_c_ladder) ladder += " " + num(v);
        add(ladder);
    }
    add("[run]");
    add(std::string("mode = ") + to_string(config.mode));
    add("seed = " + std::to_string(config.seed));
    add("workers = " + std::to_string(config.workers));
    add("[evolve]");
    add("t_final = " + num(config.evolve_t_final));
    add("step = " + (config.evolve_step > 0.0 ? num(config.evolve_step)
                                              : std::string("auto (stability bound)")));
    add("initial = " + config.evolve_initial);
    add("samples = " + std::to_string(config.evolve_samples));
    add("[fit]");
    add(std::string("model = ") +
        (config.fit_model == FitModel::two_level ? "two_level" : "eit"));
    add(std::string("domain = ") +
        (config.fit_domain == FitDomain::complex_t ? "complex" : "magnitude"));
    return lines;
}

}  // namespace eitline
