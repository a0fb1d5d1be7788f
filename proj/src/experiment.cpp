#include "wigmd/experiment.hpp"

#include <sys/utsname.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wigmd/ensemble.hpp"
#include "wigmd/observables.hpp"

namespace wigmd::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSoftware = "wigmd 1.0.0";

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::uint64_t purpose_seed(std::uint64_t master, const char* tag, double temperature, int mode_id) {
    std::uint64_t h = 1469598103934665603ull;
    for (const char* c = tag; *c; ++c) h = (h ^ std::uint64_t(*c)) * 1099511628211ull;
    std::uint64_t tbits;
    static_assert(sizeof tbits == sizeof temperature);
    std::memcpy(&tbits, &temperature, sizeof tbits);
    h = (h ^ tbits) * 1099511628211ull;
    h = (h ^ std::uint64_t(mode_id)) * 1099511628211ull;
    return rng::substream_seed(master, h);
}

std::string mode_name(forcefield::BathMode mode) {
    return mode == forcefield::BathMode::liquid ? "liquid" : "ideal_gas";
}

struct PoolKey {
    double temperature;
    int mode_id;
    bool operator<(const PoolKey& o) const {
        return temperature != o.temperature ? temperature < o.temperature : mode_id < o.mode_id;
    }
};

ensemble::EnsembleSpec cell_spec(const config::ExperimentConfig& cfg, const CellId& cell) {
    ensemble::EnsembleSpec spec;
    spec.n_trajectories = cfg.trajectories;
    spec.master_seed = purpose_seed(cfg.seed, cell.isolated ? "cell-isolated" : "cell",
                                    cell.isolated ? 0.0 : cell.temperature,
                                    cell.isolated ? -1 : int(cell.mode)) ^
                       std::hash<std::string>{}(cell.superposition);
    spec.superposition = wigner::Superposition::parse(cell.superposition);
    spec.temperature = cell.isolated ? 1.0 : cell.temperature;
    spec.mode = cell.mode;
    spec.isolated = cell.isolated;
    spec.plan.dt = cfg.dt;
    spec.plan.n_steps = long(cfg.t_end / cfg.dt + 0.5);
    spec.plan.record_stride = cfg.record_stride;
    spec.pool_size = cfg.pool_size;
    spec.pool_stride = cfg.pool_stride;
    spec.n_particles = cfg.particles;
    spec.density = cfg.density;
    spec.alpha = cfg.alpha;
    spec.workers = cfg.workers;
    spec.drift_tolerance = cfg.drift_tolerance;
    spec.equilibration.thermostat_steps = cfg.equil_steps;
    spec.equilibration.settle_steps = cfg.settle_steps;
    spec.equilibration.dt = cfg.dt;
    return spec;
}

void dump_first_trajectory(const ensemble::EnsembleResult& res, double eta,
                           const std::string& path) {
    std::ofstream os(path);
    os << "# wigmd trajectory v1\n# columns: t_star,q,p_q,E_total,T_inst\n";
    char buf[64];
    auto put = [&](double v, bool comma) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        if (comma) os << ',';
        os << buf;
    };
    (void)eta;
    for (std::size_t t = 0; t < res.times.size(); ++t) {
        put(res.times[t], false);
        put(res.q[t * std::size_t(res.n_traj)], true);
        put(res.p[t * std::size_t(res.n_traj)], true);
        put(res.mean_energy[t], true);
        put(res.mean_temperature[t], true);
        os << '\n';
    }
}

} // namespace

std::string CellId::name() const {
    if (isolated) return superposition + "_isolated";
    return superposition + "_T" + format_g(temperature) + "_" + mode_name(mode);
}

std::vector<CellId> enumerate_cells(const config::ExperimentConfig& cfg) {
    std::vector<CellId> cells;
    for (const auto& sup : cfg.superpositions) {
        for (double t : cfg.temperatures)
            for (auto mode : cfg.modes) cells.push_back({sup, t, mode, false});
        if (cfg.include_isolated) cells.push_back({sup, 0.0, forcefield::BathMode::liquid, true});
    }
    return cells;
}

RunManifest run_experiment(const config::ExperimentConfig& cfg, const RunCallbacks& cb) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    fs::create_directories(cfg.directory);
    if (!fs::is_directory(cfg.directory))
        throw std::invalid_argument("run_experiment: cannot create output directory " +
                                    cfg.directory);

    const units::PhysicalConstants pc;
    const auto rc = units::ReducedConstants::from(pc);

    RunManifest manifest;
    manifest.software = kSoftware;
    manifest.resolved = cfg;
    {
        utsname un{};
        uname(&un);
        manifest.platform = std::string(un.sysname) + " " + un.release + " " + un.machine;
    }

    // Wigner grids per superposition
    std::map<std::string, wigner::WignerGrid> grids;
    const auto morse_spec = morse::MorseSpec::i2(rc);
    for (const auto& sup : cfg.superpositions) {
        const auto state = wigner::Superposition::parse(sup);
        grids.emplace(sup, wigner::build_wigner(morse_spec, state));
        if (cfg.write_wigner) {
            std::ofstream os(fs::path(cfg.directory) / ("wigner_" + sup + ".csv"));
            grids.at(sup).write_csv(os);
        }
    }

    // bath pools and Lyapunov references, one per (temperature, mode)
    std::map<PoolKey, ensemble::BathPool> pools;
    std::map<PoolKey, observables::LyapunovSeries> lyapunovs;
    const auto cells = enumerate_cells(cfg);
    md::IntegrationPlan plan{cfg.dt, long(cfg.t_end / cfg.dt + 0.5), cfg.record_stride};

    for (const auto& cell : cells) {
        if (cell.isolated) continue;
        const PoolKey key{cell.temperature, int(cell.mode)};
        if (pools.count(key)) continue;
        if (!cb.quiet)
            std::cerr << "wigmd: preparing bath pool T*=" << cell.temperature << " "
                      << mode_name(cell.mode) << "\n";
        auto spec = cell_spec(cfg, cell);
        const auto pool_seed = purpose_seed(cfg.seed, "pool", cell.temperature, int(cell.mode));
        auto pool = ensemble::build_bath_pool(spec, rc, pool_seed);

        // bath chaos diagnostic shares the cell plan and starts from the
        // first pool snapshot
        const auto ff =
            forcefield::ForceField::standard(rc, cell.mode, spec.box_length(), cfg.alpha);
        rng::Engine lrng(purpose_seed(cfg.seed, "lyapunov", cell.temperature, int(cell.mode)));
        observables::LyapunovOptions lopt;
        lopt.delta0 = cfg.lyapunov_delta0;
        lyapunovs.emplace(key, observables::lyapunov(pool.snapshots.front(), ff, plan, lrng, lopt));
        pools.emplace(key, std::move(pool));
    }

    for (const auto& cell : cells) {
        CellOutcome outcome;
        outcome.id = cell;
        outcome.n_traj = cfg.trajectories;
        const std::string csv_name = "obs_" + cell.name() + ".csv";
        outcome.csv_path = (fs::path(cfg.directory) / csv_name).string();
        try {
            if (!cb.quiet) std::cerr << "wigmd: running cell " << cell.name() << "\n";
            auto spec = cell_spec(cfg, cell);
            ensemble::RunOptions ropt;
            if (cfg.checkpoint)
                ropt.checkpoint_path =
                    (fs::path(cfg.directory) / ("checkpoint_" + cell.name() + ".bin")).string();
            if (!cb.quiet) {
                ropt.progress = [total = spec.n_trajectories](long done, long, long flagged) {
                    if (done % 4096 == 0 || done == total)
                        std::cerr << "wigmd:   " << done << "/" << total << " trajectories"
                                  << (flagged ? " (" + std::to_string(flagged) + " flagged)" : "")
                                  << "\n";
                };
            }

            const auto& grid = grids.at(cell.superposition);
            const PoolKey key{cell.temperature, int(cell.mode)};
            const ensemble::BathPool* pool = cell.isolated ? nullptr : &pools.at(key);
            auto result = ensemble::run_ensemble(spec, rc, grid, pool, ropt);
            outcome.n_flagged = result.n_flagged;

            observables::ObservableSeries series;
            series.times = result.times;
            series.purity = observables::purity_series(
                result, observables::BinSpec::over_grid(grid, cfg.bins, cfg.bins), rc.hbar);
            if (!cell.isolated) series.lyapunov = lyapunovs.at(key);
            series.mean_energy = result.mean_energy;
            series.mean_temperature = result.mean_temperature;
            if (cell.isolated)
                series.mean_temperature.assign(result.times.size(),
                                               std::numeric_limits<double>::quiet_NaN());
            series.eta = rc.eta;

            std::ofstream os(outcome.csv_path, std::ios::trunc);
            if (!os) throw std::runtime_error("cannot write " + outcome.csv_path);
            observables::write_observables_csv(os, series);
            os.close();

            if (cfg.write_trajectories)
                dump_first_trajectory(
                    result, rc.eta,
                    (fs::path(cfg.directory) / ("traj_" + cell.name() + ".csv")).string());

            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.error = e.what();
            if (!cb.quiet) std::cerr << "wigmd: cell " << cell.name() << " failed: " << e.what() << "\n";
        }
        manifest.cells.push_back(std::move(outcome));
    }

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    manifest.plot_files = emit_plots(manifest, cfg.directory);
    write_manifest(manifest, (fs::path(cfg.directory) / "run_manifest.json").string());
    return manifest;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["schema_version"] = manifest.schema_version;
    j["software"] = manifest.software;
    j["platform"] = manifest.platform;
    j["wall_seconds"] = manifest.wall_seconds;
    j["resolved_config"] = manifest.resolved.to_ini();
    j["cells"] = json::array();
    for (const auto& c : manifest.cells) {
        json jc;
        jc["name"] = c.id.name();
        jc["superposition"] = c.id.superposition;
        jc["temperature"] = c.id.temperature;
        jc["mode"] = mode_name(c.id.mode);
        jc["isolated"] = c.id.isolated;
        jc["csv"] = c.csv_path;
        jc["n_traj"] = c.n_traj;
        jc["n_flagged"] = c.n_flagged;
        jc["ok"] = c.ok;
        jc["error"] = c.error;
        j["cells"].push_back(jc);
    }
    j["plots"] = manifest.plot_files;

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write manifest " + path);
    os << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open manifest " + path);
    json j;
    is >> j;
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1)
        throw std::invalid_argument("unsupported manifest schema version " +
                                    std::to_string(m.schema_version));
    m.software = j.at("software").get<std::string>();
    m.platform = j.at("platform").get<std::string>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.resolved = config::parse_config(j.at("resolved_config").get<std::string>());
    for (const auto& jc : j.at("cells")) {
        CellOutcome c;
        c.id.superposition = jc.at("superposition").get<std::string>();
        c.id.temperature = jc.at("temperature").get<double>();
        c.id.mode = jc.at("mode").get<std::string>() == "liquid" ? forcefield::BathMode::liquid
                                                                 : forcefield::BathMode::ideal_gas;
        c.id.isolated = jc.at("isolated").get<bool>();
        c.csv_path = jc.at("csv").get<std::string>();
        c.n_traj = jc.at("n_traj").get<long>();
        c.n_flagged = jc.at("n_flagged").get<long>();
        c.ok = jc.at("ok").get<bool>();
        c.error = jc.at("error").get<std::string>();
        m.cells.push_back(std::move(c));
    }
    if (j.contains("plots")) m.plot_files = j.at("plots").get<std::vector<std::string>>();
    return m;
}

config::ExperimentConfig config_from_manifest(const std::string& path) {
    return read_manifest(path).resolved;
}

namespace {

// minimal reader for our own observable CSVs
struct CsvSeries {
    std::vector<double> t, chi, chi_err, ln_d;
    bool ok = false;
};

CsvSeries read_observables(const std::string& path) {
    CsvSeries s;
    std::ifstream is(path);
    if (!is) return s;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string item;
        std::vector<double> vals;
        while (std::getline(row, item, ',')) vals.push_back(std::strtod(item.c_str(), nullptr));
        if (vals.size() < 9) return s;
        s.t.push_back(vals[0]);
        s.chi.push_back(vals[2]);
        s.chi_err.push_back(vals[3]);
        s.ln_d.push_back(vals[6]);
    }
    s.ok = !s.t.empty();
    return s;
}

} // namespace

std::vector<std::string> emit_plots(const RunManifest& manifest, const std::string& directory) {
    std::vector<std::string> written;
    const auto& cfg = manifest.resolved;

    auto find_cell = [&](const std::string& sup, double t, forcefield::BathMode mode,
                         bool isolated) -> const CellOutcome* {
        for (const auto& c : manifest.cells) {
            if (c.id.superposition != sup || c.id.isolated != isolated) continue;
            if (!isolated && (c.id.temperature != t || c.id.mode != mode)) continue;
            if (!c.ok) return nullptr;
            return &c;
        }
        return nullptr;
    };

    // purity figures: one per (superposition, temperature)
    for (const auto& sup : cfg.superpositions) {
        for (double t : cfg.temperatures) {
            const auto* liquid = find_cell(sup, t, forcefield::BathMode::liquid, false);
            const auto* ideal = find_cell(sup, t, forcefield::BathMode::ideal_gas, false);
            const auto* isolated = find_cell(sup, 0.0, forcefield::BathMode::liquid, true);
            if (!liquid && !ideal && !isolated) {
                std::cerr << "wigmd: no completed series for superposition " << sup << " at T*="
                          << t << "; figure skipped\n";
                continue;
            }
            CsvSeries sl = liquid ? read_observables(liquid->csv_path) : CsvSeries{};
            CsvSeries si = ideal ? read_observables(ideal->csv_path) : CsvSeries{};
            CsvSeries so = isolated ? read_observables(isolated->csv_path) : CsvSeries{};
            const CsvSeries* axis = sl.ok ? &sl : si.ok ? &si : &so;
            if (!axis->ok) continue;

            const std::string path =
                (fs::path(directory) / ("fig_purity_" + sup + "_T" + format_g(t) + ".csv"))
                    .string();
            std::ofstream os(path, std::ios::trunc);
            os << "# wigmd figure: purity vs time, superposition " << sup << ", T*=" << format_g(t)
               << "\n";
            os << "# columns: t_star,chi_liquid,chi_liquid_err,chi_ideal_gas,chi_ideal_gas_err,"
                  "chi_isolated,chi_isolated_err\n";
            char buf[64];
            auto put = [&](double v, bool comma) {
                std::snprintf(buf, sizeof buf, "%.12g", v);
                if (comma) os << ',';
                os << buf;
            };
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t i = 0; i < axis->t.size(); ++i) {
                put(axis->t[i], false);
                put(sl.ok && i < sl.chi.size() ? sl.chi[i] : nan, true);
                put(sl.ok && i < sl.chi.size() ? sl.chi_err[i] : nan, true);
                put(si.ok && i < si.chi.size() ? si.chi[i] : nan, true);
                put(si.ok && i < si.chi.size() ? si.chi_err[i] : nan, true);
                put(so.ok && i < so.chi.size() ? so.chi[i] : nan, true);
                put(so.ok && i < so.chi.size() ? so.chi_err[i] : nan, true);
                os << '\n';
            }
            written.push_back(path);
        }
    }

    // Lyapunov figures: one per temperature (superposition-independent); the
    // first superposition's cells carry the series
    if (!cfg.superpositions.empty()) {
        const auto& sup = cfg.superpositions.front();
        for (double t : cfg.temperatures) {
            const auto* liquid = find_cell(sup, t, forcefield::BathMode::liquid, false);
            const auto* ideal = find_cell(sup, t, forcefield::BathMode::ideal_gas, false);
            if (!liquid && !ideal) continue;
            CsvSeries sl = liquid ? read_observables(liquid->csv_path) : CsvSeries{};
            CsvSeries si = ideal ? read_observables(ideal->csv_path) : CsvSeries{};
            const CsvSeries* axis = sl.ok ? &sl : &si;
            if (!axis->ok) continue;

            const std::string path =
                (fs::path(directory) / ("fig_lyapunov_T" + format_g(t) + ".csv")).string();
            std::ofstream os(path, std::ios::trunc);
            os << "# wigmd figure: bath divergence vs time, T*=" << format_g(t) << "\n";
            os << "# columns: t_star,ln_d_liquid,ln_d_ideal_gas\n";
            char buf[64];
            auto put = [&](double v, bool comma) {
                std::snprintf(buf, sizeof buf, "%.12g", v);
                if (comma) os << ',';
                os << buf;
            };
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t i = 0; i < axis->t.size(); ++i) {
                put(axis->t[i], false);
                put(sl.ok && i < sl.ln_d.size() ? sl.ln_d[i] : nan, true);
                put(si.ok && i < si.ln_d.size() ? si.ln_d[i] : nan, true);
                os << '\n';
            }
            written.push_back(path);
        }
    }
    return written;
}

bool all_cells_ok(const RunManifest& manifest) {
    for (const auto& c : manifest.cells) {
        if (!c.ok) return false;
        if (c.n_flagged * 100 > c.n_traj) return false;
    }
    return !manifest.cells.empty();
}

} // namespace wigmd::experiment
