#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wigmd/experiment.hpp"
#include "wigmd/observables.hpp"

namespace {

// exit codes: 0 success, 1 config error, 2 runtime cell failure
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

bool looks_like_manifest(const std::string& path) {
    std::ifstream is(path);
    char c = 0;
    while (is.get(c))
        if (!std::isspace(static_cast<unsigned char>(c))) break;
    return c == '{';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wigmd - vibrational decoherence of I2 in a Xe bath via "
                 "signed Wigner sampling and classical trajectories"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_preset = "desk", run_out;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false, run_quiet = false;
    int run_workers = -1;
    auto* run = app.add_subcommand("run", "run the experiment grid from a config file or preset");
    run->add_option("--config", run_config, "config file (INI) or a previous run_manifest.json");
    run->add_option("--preset", run_preset, "base preset: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    run->add_option("--seed", run_seed, "override the master seed")
        ->each([&](const std::string&) { run_seed_set = true; });
    run->add_option("--out", run_out, "override the output directory");
    run->add_option("--workers", run_workers, "override the worker count (0 = all cores)");
    run->add_flag("--quiet", run_quiet, "suppress progress output");

    // plots
    std::string plots_manifest, plots_out;
    auto* plots = app.add_subcommand("plots", "regenerate plot-ready CSVs from a run manifest");
    plots->add_option("--manifest", plots_manifest, "path to run_manifest.json")->required();
    plots->add_option("--out", plots_out, "output directory (default: alongside the manifest)");

    // dump-wigner
    std::string dw_state = "0+2", dw_out = "wigner.csv";
    int dw_nq = 512, dw_np = 512;
    bool dw_binary = false;
    auto* dump = app.add_subcommand("dump-wigner", "tabulate a superposition's Wigner function");
    dump->add_option("--superposition", dw_state, "state specification, e.g. 0+2");
    dump->add_option("--nq", dw_nq, "grid cells along q");
    dump->add_option("--np", dw_np, "grid cells along p");
    dump->add_option("--out", dw_out, "output file");
    dump->add_flag("--binary", dw_binary, "write the flat binary format instead of CSV");

    // print-config
    std::string pc_preset = "desk";
    auto* print_cfg = app.add_subcommand("print-config", "print a preset's resolved key set");
    print_cfg->add_option("--preset", pc_preset, "desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            wigmd::config::ExperimentConfig cfg;
            try {
                cfg = wigmd::config::preset(run_preset);
                if (!run_config.empty()) {
                    if (looks_like_manifest(run_config))
                        cfg = wigmd::experiment::config_from_manifest(run_config);
                    else
                        cfg = wigmd::config::parse_config_file(run_config, cfg);
                }
                if (run_seed_set) cfg.seed = run_seed;
                if (!run_out.empty()) cfg.directory = run_out;
                if (run_workers >= 0) cfg.workers = run_workers;
                cfg.validate();
            } catch (const std::exception& e) {
                std::cerr << "wigmd: config error: " << e.what() << "\n";
                return kExitConfig;
            }

            wigmd::experiment::RunCallbacks cb;
            cb.quiet = run_quiet;
            const auto manifest = wigmd::experiment::run_experiment(cfg, cb);
            if (!wigmd::experiment::all_cells_ok(manifest)) {
                std::cerr << "wigmd: one or more cells failed\n";
                return kExitRuntime;
            }
            std::cout << "wigmd: " << manifest.cells.size() << " cells completed; outputs in "
                      << cfg.directory << "\n";
            return kExitOk;
        }

        if (*plots) {
            const auto manifest = wigmd::experiment::read_manifest(plots_manifest);
            const std::string dir =
                plots_out.empty()
                    ? std::filesystem::path(plots_manifest).parent_path().string()
                    : plots_out;
            const auto files = wigmd::experiment::emit_plots(manifest, dir.empty() ? "." : dir);
            std::cout << "wigmd: wrote " << files.size() << " figure files\n";
            return kExitOk;
        }

        if (*dump) {
            const wigmd::units::PhysicalConstants pc;
            const auto rc = wigmd::units::ReducedConstants::from(pc);
            const auto spec = wigmd::morse::MorseSpec::i2(rc);
            wigmd::wigner::GridSpec gs;
            gs.nq = dw_nq;
            gs.np = dw_np;
            const auto grid =
                wigmd::wigner::build_wigner(spec, wigmd::wigner::Superposition::parse(dw_state), gs);
            std::ofstream os(dw_out, dw_binary ? std::ios::binary | std::ios::trunc
                                               : std::ios::trunc);
            if (!os) {
                std::cerr << "wigmd: cannot write " << dw_out << "\n";
                return kExitRuntime;
            }
            if (dw_binary)
                grid.write_binary(os);
            else
                grid.write_csv(os);
            std::cout << "wigmd: wrote " << dw_out << " (integral " << grid.integral()
                      << ", negative fraction " << grid.negative_fraction() << ")\n";
            return kExitOk;
        }

        if (*print_cfg) {
            std::cout << wigmd::config::preset(pc_preset).to_ini();
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "wigmd: error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
