#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "eitline/commands.hpp"
#include "eitline/errors.hpp"
#include "eitline/version.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string mode;
    long long seed = -1;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "run configuration file")->required();
    cmd->add_option("--out", opt.out_path, "output path (default: [run] out, else stdout)");
    cmd->add_option("--mode", opt.mode, "sweep mode override")
        ->check(CLI::IsMember({"analytic", "numeric"}));
    cmd->add_option("--seed", opt.seed, "seed override");
    cmd->add_option("--workers", opt.workers, "worker thread override")
        ->check(CLI::PositiveNumber);
}

eitline::RunConfig load(const CommonOptions& opt) {
    eitline::RunConfig config = eitline::parse_config_file(opt.config_path);
    if (!opt.mode.empty()) {
        config.mode = opt.mode == "numeric" ? eitline::SweepMode::full_numeric
                                            : eitline::SweepMode::weak_probe_analytic;
    }
    if (opt.seed >= 0) {
        config.seed = static_cast<std::uint64_t>(opt.seed);
    }
    if (opt.workers > 0) {
        config.workers = static_cast<unsigned>(opt.workers);
    }
    if (!opt.out_path.empty()) {
        config.out_path = opt.out_path;
    }
    return config;
}

// Renders into a buffer first so a failed run never leaves a partial file.
void emit(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        std::cout.flush();
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw eitline::IoError("cannot open output file: " + out_path);
    }
    out << payload;
    out.flush();
    if (!out) {
        throw eitline::IoError("failed writing output file: " + out_path);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("eitline ") + eitline::version +
                 " - single-atom EIT and quantum-switch simulator"};
    app.set_version_flag("--version", eitline::version);
    app.require_subcommand(1);

    CommonOptions opt;
    std::string trace_path;

    CLI::App* spectrum = app.add_subcommand("spectrum", "probe-detuning transmission sweep");
    add_common(spectrum, opt);
    CLI::App* map = app.add_subcommand("map", "2D control-amplitude / detuning map");
    add_common(map, opt);
    CLI::App* extinction =
        app.add_subcommand("extinction", "resonant transmission vs control amplitude");
    add_common(extinction, opt);
    CLI::App* evolve = app.add_subcommand("evolve", "population time series");
    add_common(evolve, opt);
    CLI::App* fit = app.add_subcommand("fit", "line-shape parameter extraction");
    add_common(fit, opt);
    fit->add_option("--trace", trace_path, "trace CSV to fit")->required();
    CLI::App* atom_info = app.add_subcommand("atom-info", "derived atomic quantities");
    add_common(atom_info, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return 2;
    }

    try {
        const eitline::RunConfig config = load(opt);
        std::ostringstream payload;
        if (spectrum->parsed()) {
            eitline::cmd_spectrum(config, payload);
        } else if (map->parsed()) {
            eitline::cmd_map(config, payload);
        } else if (extinction->parsed()) {
            std::ostringstream summary;
            eitline::cmd_extinction(config, payload, summary);
            emit(config.out_path, payload.str());
            if (!config.out_path.empty()) {
                std::cout << summary.str();
            }
            return 0;
        } else if (evolve->parsed()) {
            eitline::cmd_evolve(config, payload);
        } else if (fit->parsed()) {
            const eitline::Trace trace = eitline::read_trace_file(trace_path);
            eitline::cmd_fit(config, trace, payload);
        } else if (atom_info->parsed()) {
            eitline::cmd_atom_info(config, payload);
        }
        emit(config.out_path, payload.str());
        return 0;
    } catch (const eitline::ConfigError& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 2;
    } catch (const eitline::IoError& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 4;
    } catch (const eitline::Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error[InternalError]: " << e.what() << "\n";
        return 3;
    }
}
