#include "wigmd/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace wigmd::ensemble {

namespace {

constexpr long kChunkSize = 64;  // trajectories per work unit, fixed for determinism

std::uint64_t mix_bits(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t double_bits(double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
}

} // namespace

void EnsembleSpec::validate() const {
    if (n_trajectories < 2)
        throw std::invalid_argument("EnsembleSpec: need at least 2 trajectories (split halves)");
    if (pool_size < 1) throw std::invalid_argument("EnsembleSpec: pool_size must be >= 1");
    if (pool_stride < 1) throw std::invalid_argument("EnsembleSpec: pool_stride must be >= 1");
    if (n_particles < 2) throw std::invalid_argument("EnsembleSpec: need at least 2 particles");
    if (!(density > 0.0)) throw std::invalid_argument("EnsembleSpec: density must be positive");
    if (!(temperature > 0.0)) throw std::invalid_argument("EnsembleSpec: temperature must be positive");
    if (!(drift_tolerance > 0.0))
        throw std::invalid_argument("EnsembleSpec: drift_tolerance must be positive");
    if (superposition.terms.empty())
        throw std::invalid_argument("EnsembleSpec: empty superposition");
}

double EnsembleSpec::box_length() const { return std::cbrt(double(n_particles) / density); }

std::uint64_t EnsembleSpec::content_hash() const {
    std::uint64_t h = 0xC0FFEE1234ABCDEFull;
    h = mix_bits(h, std::uint64_t(n_trajectories));
    h = mix_bits(h, master_seed);
    for (const auto& t : superposition.terms) {
        h = mix_bits(h, std::uint64_t(t.n));
        h = mix_bits(h, double_bits(t.c.real()));
        h = mix_bits(h, double_bits(t.c.imag()));
    }
    h = mix_bits(h, double_bits(temperature));
    h = mix_bits(h, std::uint64_t(mode == forcefield::BathMode::liquid ? 1 : 2));
    h = mix_bits(h, std::uint64_t(isolated ? 1 : 0));
    h = mix_bits(h, double_bits(plan.dt));
    h = mix_bits(h, std::uint64_t(plan.n_steps));
    h = mix_bits(h, std::uint64_t(plan.record_stride));
    h = mix_bits(h, std::uint64_t(pool_size));
    h = mix_bits(h, std::uint64_t(pool_stride));
    h = mix_bits(h, std::uint64_t(n_particles));
    h = mix_bits(h, double_bits(density));
    h = mix_bits(h, double_bits(alpha));
    h = mix_bits(h, double_bits(drift_tolerance));
    return h;
}

BathPool build_bath_pool(const EnsembleSpec& spec, const units::ReducedConstants& rc,
                         std::uint64_t pool_seed) {
    spec.validate();
    rng::Engine rng(pool_seed);
    const auto ff = forcefield::ForceField::standard(rc, spec.mode, spec.box_length(), spec.alpha);

    SystemState state = spec.mode == forcefield::BathMode::liquid
                            ? md::lattice_configuration(spec.n_particles, spec.density)
                            : md::random_configuration(spec.n_particles, spec.density,
                                                       ff.i2_xe.sigma0, rng);
    md::equilibrate(state, spec.temperature, ff, spec.equilibration, rng);

    BathPool pool;
    pool.snapshots.reserve(spec.pool_size);
    md::Propagator prop(ff, /*clamp_q=*/true);
    prop.prepare(state);
    for (int s = 0; s < spec.pool_size; ++s) {
        for (long k = 0; k < spec.pool_stride; ++k) prop.step(state, spec.equilibration.dt);
        SystemState snap = state;
        snap.time = 0.0;
        pool.snapshots.push_back(std::move(snap));
    }
    return pool;
}

InitialCondition make_initial(const EnsembleSpec& spec, const wigner::WignerSampler& sampler,
                              const BathPool& pool, long index) {
    if (pool.snapshots.empty()) throw std::invalid_argument("make_initial: empty bath pool");
    rng::Engine rng(rng::substream_seed(spec.master_seed, std::uint64_t(index)));
    const auto pick = rng.uniform_index(pool.snapshots.size());
    const auto pt = sampler.sample(rng);
    InitialCondition ic;
    ic.state = pool.snapshots[pick];
    ic.state.q = pt.q;
    ic.state.p_q = pt.p;
    ic.state.time = 0.0;
    ic.sign = pt.sign;
    return ic;
}

SnapshotBatch EnsembleResult::at(std::size_t time_index) const {
    SnapshotBatch b;
    b.time = times.at(time_index);
    const std::size_t n = std::size_t(n_traj);
    b.q = std::span<const double>(q.data() + time_index * n, n);
    b.p = std::span<const double>(p.data() + time_index * n, n);
    b.signs = std::span<const std::int8_t>(signs.data(), n);
    b.flagged = std::span<const std::uint8_t>(flagged.data(), n);
    return b;
}

long EnsembleResult::sum_signs() const {
    long s = 0;
    for (auto v : signs) s += v;
    return s;
}

// --------------------------------------------------------------- internals

namespace {

struct Accumulators {
    long n = 0, n_times = 0, n_chunks = 0;
    std::vector<double> q, p;                      // [time][traj]
    std::vector<std::int8_t> signs;
    std::vector<std::uint8_t> flagged;
    std::vector<double> drift;
    std::vector<double> chunk_sum_e, chunk_sum_t;  // [chunk][time]
    std::vector<std::int64_t> chunk_included;      // [chunk]
    std::vector<std::uint8_t> chunk_done;          // [chunk]
};

constexpr char kCheckpointMagic[8] = {'W', 'G', 'M', 'D', 'C', 'K', 'P', '1'};

// Checkpoint: header + one record per completed chunk. Only completed chunks
// are serialized, so the writer never touches memory a worker is filling.
void write_checkpoint(const std::string& path, std::uint64_t hash, const Accumulators& acc,
                      const std::vector<long>& completed) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("checkpoint: cannot write " + tmp);
        auto put = [&os](const void* data, std::size_t bytes) {
            os.write(reinterpret_cast<const char*>(data), std::streamsize(bytes));
        };
        os.write(kCheckpointMagic, 8);
        const std::int64_t n = acc.n, n_times = acc.n_times, chunk = kChunkSize,
                           n_chunks = acc.n_chunks, n_done = std::int64_t(completed.size());
        put(&hash, sizeof hash);
        put(&n, sizeof n);
        put(&n_times, sizeof n_times);
        put(&chunk, sizeof chunk);
        put(&n_chunks, sizeof n_chunks);
        put(&n_done, sizeof n_done);
        for (long c : completed) {
            const long lo = c * kChunkSize, hi = std::min(acc.n, lo + kChunkSize);
            const std::int64_t id = c, count = hi - lo;
            put(&id, sizeof id);
            put(&count, sizeof count);
            put(&acc.chunk_included[c], sizeof(std::int64_t));
            put(acc.signs.data() + lo, std::size_t(count));
            put(acc.flagged.data() + lo, std::size_t(count));
            put(acc.drift.data() + lo, std::size_t(count) * sizeof(double));
            for (long t = 0; t < acc.n_times; ++t) {
                put(acc.q.data() + std::size_t(t) * acc.n + lo, std::size_t(count) * sizeof(double));
                put(acc.p.data() + std::size_t(t) * acc.n + lo, std::size_t(count) * sizeof(double));
            }
            put(acc.chunk_sum_e.data() + std::size_t(c) * acc.n_times,
                std::size_t(acc.n_times) * sizeof(double));
            put(acc.chunk_sum_t.data() + std::size_t(c) * acc.n_times,
                std::size_t(acc.n_times) * sizeof(double));
        }
    }
    std::filesystem::rename(tmp, path);
}

std::vector<long> load_checkpoint(const std::string& path, std::uint64_t hash, Accumulators& acc) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return {};
    auto get = [&is](void* data, std::size_t bytes) {
        is.read(reinterpret_cast<char*>(data), std::streamsize(bytes));
    };
    char magic[8];
    std::uint64_t file_hash = 0;
    std::int64_t n = 0, n_times = 0, chunk = 0, n_chunks = 0, n_done = 0;
    is.read(magic, 8);
    get(&file_hash, sizeof file_hash);
    get(&n, sizeof n);
    get(&n_times, sizeof n_times);
    get(&chunk, sizeof chunk);
    get(&n_chunks, sizeof n_chunks);
    get(&n_done, sizeof n_done);
    if (!is || std::memcmp(magic, kCheckpointMagic, 8) != 0 || file_hash != hash || n != acc.n ||
        n_times != acc.n_times || chunk != kChunkSize || n_chunks != acc.n_chunks)
        return {};

    std::vector<long> completed;
    for (std::int64_t rec = 0; rec < n_done; ++rec) {
        std::int64_t id = 0, count = 0;
        get(&id, sizeof id);
        get(&count, sizeof count);
        if (!is || id < 0 || id >= n_chunks) return {};
        const long lo = long(id) * kChunkSize;
        if (count != std::min<std::int64_t>(acc.n - lo, kChunkSize)) return {};
        get(&acc.chunk_included[id], sizeof(std::int64_t));
        get(acc.signs.data() + lo, std::size_t(count));
        get(acc.flagged.data() + lo, std::size_t(count));
        get(acc.drift.data() + lo, std::size_t(count) * sizeof(double));
        for (long t = 0; t < acc.n_times; ++t) {
            get(acc.q.data() + std::size_t(t) * acc.n + lo, std::size_t(count) * sizeof(double));
            get(acc.p.data() + std::size_t(t) * acc.n + lo, std::size_t(count) * sizeof(double));
        }
        get(acc.chunk_sum_e.data() + std::size_t(id) * acc.n_times,
            std::size_t(acc.n_times) * sizeof(double));
        get(acc.chunk_sum_t.data() + std::size_t(id) * acc.n_times,
            std::size_t(acc.n_times) * sizeof(double));
        if (!is) return {};
        acc.chunk_done[id] = 1;
        completed.push_back(long(id));
    }
    return completed;
}

} // namespace

EnsembleResult run_ensemble(const EnsembleSpec& spec, const units::ReducedConstants& rc,
                            const wigner::WignerGrid& grid, const BathPool* pool,
                            const RunOptions& options) {
    spec.validate();
    const auto morse_spec = morse::MorseSpec::i2(rc);
    spec.plan.validate(morse_spec.period());
    if (!spec.isolated) {
        if (pool == nullptr || pool->snapshots.empty())
            throw std::invalid_argument("run_ensemble: empty bath pool");
        if (std::abs(pool->snapshots.front().box_length - spec.box_length()) > 1e-12)
            throw std::invalid_argument("run_ensemble: pool box does not match spec");
    }

    const wigner::WignerSampler sampler(grid);
    const long n_times = spec.plan.n_records();
    const long n = spec.n_trajectories;
    const long n_chunks = (n + kChunkSize - 1) / kChunkSize;

    Accumulators acc;
    acc.n = n;
    acc.n_times = n_times;
    acc.n_chunks = n_chunks;
    acc.q.assign(std::size_t(n_times) * n, 0.0);
    acc.p.assign(std::size_t(n_times) * n, 0.0);
    acc.signs.assign(n, 0);
    acc.flagged.assign(n, 0);
    acc.drift.assign(n, 0.0);
    acc.chunk_sum_e.assign(std::size_t(n_chunks) * n_times, 0.0);
    acc.chunk_sum_t.assign(std::size_t(n_chunks) * n_times, 0.0);
    acc.chunk_included.assign(n_chunks, 0);
    acc.chunk_done.assign(n_chunks, 0);

    const std::uint64_t hash = spec.content_hash();
    const bool checkpointing = !options.checkpoint_path.empty();
    std::vector<long> completed;
    if (checkpointing) completed = load_checkpoint(options.checkpoint_path, hash, acc);

    std::atomic<long> next_chunk{0};
    std::atomic<long> done_traj{0};
    std::atomic<long> flagged_count{0};
    std::mutex io_mutex;
    long writes_pending = 0;
    const long write_every = std::max<long>(1, n_chunks / 8);
    std::exception_ptr first_error;

    for (long c : completed) {
        const long lo = c * kChunkSize, hi = std::min(n, lo + kChunkSize);
        done_traj += hi - lo;
        for (long i = lo; i < hi; ++i)
            if (acc.flagged[i]) ++flagged_count;
    }

    auto worker = [&]() {
        try {
            const auto ff =
                forcefield::ForceField::standard(rc, spec.mode, spec.box_length(), spec.alpha);
            md::Propagator prop(ff);
            for (;;) {
                const long c = next_chunk.fetch_add(1);
                if (c >= n_chunks) break;
                if (acc.chunk_done[c]) continue;
                const long lo = c * kChunkSize, hi = std::min(n, lo + kChunkSize);

                for (long i = lo; i < hi; ++i) {
                    md::TrajectoryRecord rec;
                    int sign = 1;
                    if (spec.isolated) {
                        rng::Engine rng(rng::substream_seed(spec.master_seed, std::uint64_t(i)));
                        const auto pt = sampler.sample(rng);
                        sign = pt.sign;
                        rec = md::run_isolated_trajectory(pt.q, pt.p, spec.plan, morse_spec);
                    } else {
                        auto ic = make_initial(spec, sampler, *pool, i);
                        sign = ic.sign;
                        rec = md::run_trajectory(std::move(ic.state), spec.plan, prop);
                    }

                    acc.signs[i] = std::int8_t(sign);
                    acc.drift[i] = rec.max_energy_drift;
                    const bool bad = rec.max_energy_drift > spec.drift_tolerance;
                    acc.flagged[i] = bad ? 1 : 0;
                    if (bad) ++flagged_count;
                    for (long t = 0; t < n_times; ++t) {
                        acc.q[std::size_t(t) * n + i] = rec.q[t];
                        acc.p[std::size_t(t) * n + i] = rec.p_q[t];
                        if (!bad) {
                            acc.chunk_sum_e[std::size_t(c) * n_times + t] += rec.energy[t];
                            acc.chunk_sum_t[std::size_t(c) * n_times + t] += rec.temperature[t];
                        }
                    }
                    if (!bad) ++acc.chunk_included[c];
                }
                acc.chunk_done[c] = 1;
                done_traj += hi - lo;

                std::lock_guard<std::mutex> lock(io_mutex);
                completed.push_back(c);
                if (options.progress) options.progress(done_traj.load(), n, flagged_count.load());
                if (checkpointing && ++writes_pending >= write_every) {
                    writes_pending = 0;
                    write_checkpoint(options.checkpoint_path, hash, acc, completed);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(io_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    int n_workers = spec.workers > 0 ? spec.workers : int(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = int(std::min<long>(n_workers, n_chunks));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    EnsembleResult result;
    result.n_traj = n;
    result.times.resize(n_times);
    for (long t = 0; t < n_times; ++t)
        result.times[t] = double(t * spec.plan.record_stride) * spec.plan.dt;
    result.signs = std::move(acc.signs);
    result.flagged = std::move(acc.flagged);
    result.drift = std::move(acc.drift);
    result.one_norm = grid.one_norm;
    result.n_flagged = flagged_count.load();

    // merge per-chunk diagnostics in fixed chunk order
    result.mean_energy.assign(n_times, 0.0);
    result.mean_temperature.assign(n_times, 0.0);
    long included = 0;
    for (long c = 0; c < n_chunks; ++c) included += acc.chunk_included[c];
    for (long t = 0; t < n_times; ++t) {
        double se = 0.0, st = 0.0;
        for (long c = 0; c < n_chunks; ++c) {
            se += acc.chunk_sum_e[std::size_t(c) * n_times + t];
            st += acc.chunk_sum_t[std::size_t(c) * n_times + t];
        }
        result.mean_energy[t] = included > 0 ? se / double(included) : 0.0;
        result.mean_temperature[t] = included > 0 ? st / double(included) : 0.0;
    }
    result.q = std::move(acc.q);
    result.p = std::move(acc.p);

    if (checkpointing) {
        std::error_code ec;
        std::filesystem::remove(options.checkpoint_path, ec);
    }

    if (result.n_flagged * 100 > n)
        throw std::runtime_error("run_ensemble: " + std::to_string(result.n_flagged) + " of " +
                                 std::to_string(n) +
                                 " trajectories exceeded the energy-drift tolerance (over 1%)");
    return result;
}

} // namespace wigmd::ensemble
