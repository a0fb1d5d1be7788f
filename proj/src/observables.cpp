#include "wigmd/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace wigmd::observables {

BinSpec BinSpec::over_grid(const wigner::WignerGrid& grid, int nq, int np) {
    BinSpec b;
    b.nq = nq;
    b.np = np;
    b.q_lo = grid.q_axis.front() - 0.5 * grid.dq;
    b.q_hi = grid.q_axis.back() + 0.5 * grid.dq;
    b.p_lo = grid.p_axis.front() - 0.5 * grid.dp;
    b.p_hi = grid.p_axis.back() + 0.5 * grid.dp;
    return b;
}

bool BinSpec::same_geometry(const BinSpec& o) const {
    return nq == o.nq && np == o.np && q_lo == o.q_lo && q_hi == o.q_hi && p_lo == o.p_lo &&
           p_hi == o.p_hi;
}

double BinSpec::cell_area() const {
    return (q_hi - q_lo) / nq * (p_hi - p_lo) / np;
}

double ReducedDensityHistogram::total_signed_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s * bins.cell_area();
}

ReducedDensityHistogram reduce_and_bin(const ensemble::SnapshotBatch& batch, const BinSpec& bins,
                                       Half half, double one_norm, int n_blocks) {
    if (bins.nq < 1 || bins.np < 1 || !(bins.q_hi > bins.q_lo) || !(bins.p_hi > bins.p_lo))
        throw std::invalid_argument("reduce_and_bin: bad bin geometry");
    if (n_blocks < 1) throw std::invalid_argument("reduce_and_bin: n_blocks must be >= 1");
    const long n = long(batch.q.size());
    if (n == 0) throw std::invalid_argument("reduce_and_bin: empty batch");

    ReducedDensityHistogram hist;
    hist.bins = bins;
    hist.one_norm = one_norm;
    hist.block_counts.assign(n_blocks, std::vector<std::int64_t>(std::size_t(bins.nq) * bins.np, 0));
    hist.block_n.assign(n_blocks, 0);

    const double inv_wq = bins.nq / (bins.q_hi - bins.q_lo);
    const double inv_wp = bins.np / (bins.p_hi - bins.p_lo);
    const int parity = half == Half::A ? 0 : 1;
    long outside = 0;

    for (long i = parity; i < n; i += 2) {
        if (batch.flagged[i]) continue;
        const int block = int((__int128(i) * n_blocks) / n);
        ++hist.block_n[block];
        ++hist.n_included;
        const int iq = int(std::floor((batch.q[i] - bins.q_lo) * inv_wq));
        const int ip = int(std::floor((batch.p[i] - bins.p_lo) * inv_wp));
        if (iq < 0 || iq >= bins.nq || ip < 0 || ip >= bins.np) {
            ++outside;
            continue;
        }
        hist.block_counts[block][std::size_t(iq) * bins.np + ip] += batch.signs[i];
    }

    if (hist.n_included == 0) throw std::runtime_error("reduce_and_bin: no included trajectories");
    hist.outside_fraction = double(outside) / double(hist.n_included);
    if (hist.outside_fraction > 0.02)
        throw std::runtime_error("reduce_and_bin: " + std::to_string(100.0 * hist.outside_fraction) +
                                 "% of samples outside the binned range");

    hist.weights.assign(std::size_t(bins.nq) * bins.np, 0.0);
    const double scale = one_norm / (double(hist.n_included) * bins.cell_area());
    for (const auto& block : hist.block_counts)
        for (std::size_t c = 0; c < block.size(); ++c) hist.weights[c] += double(block[c]) * scale;
    return hist;
}

PurityEstimate purity(const ReducedDensityHistogram& a, const ReducedDensityHistogram& b,
                      double hbar) {
    if (!a.bins.same_geometry(b.bins))
        throw std::invalid_argument("purity: histogram bin geometries differ");
    if (a.block_counts.size() != b.block_counts.size())
        throw std::invalid_argument("purity: histogram block counts differ");

    const std::size_t cells = a.weights.size();
    const int n_blocks = int(a.block_counts.size());

    std::vector<std::int64_t> total_a(cells, 0), total_b(cells, 0);
    for (int k = 0; k < n_blocks; ++k)
        for (std::size_t c = 0; c < cells; ++c) {
            total_a[c] += a.block_counts[k][c];
            total_b[c] += b.block_counts[k][c];
        }

    auto dot = [cells](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
        std::int64_t s = 0;
        for (std::size_t c = 0; c < cells; ++c) s += x[c] * y[c];
        return s;
    };

    const double area = a.bins.cell_area();
    const double nu2 = a.one_norm * b.one_norm;
    const std::int64_t s_full = dot(total_a, total_b);
    const double n_a = double(a.n_included), n_b = double(b.n_included);

    PurityEstimate est;
    est.chi_raw = nu2 * double(s_full) / (n_a * n_b * area);
    est.chi = 2.0 * M_PI * hbar * est.chi_raw;

    // delete-one-block jackknife
    std::vector<double> jk;
    jk.reserve(n_blocks);
    for (int k = 0; k < n_blocks; ++k) {
        const double na_k = n_a - double(a.block_n[k]);
        const double nb_k = n_b - double(b.block_n[k]);
        if (na_k <= 0.0 || nb_k <= 0.0) continue;
        const std::int64_t s_k = s_full - dot(total_a, b.block_counts[k]) -
                                 dot(a.block_counts[k], total_b) +
                                 dot(a.block_counts[k], b.block_counts[k]);
        jk.push_back(2.0 * M_PI * hbar * nu2 * double(s_k) / (na_k * nb_k * area));
    }
    if (jk.size() >= 2) {
        double mean = 0.0;
        for (double v : jk) mean += v;
        mean /= double(jk.size());
        double var = 0.0;
        for (double v : jk) var += (v - mean) * (v - mean);
        est.chi_err = std::sqrt(var * double(jk.size() - 1) / double(jk.size()));
    } else {
        est.chi_err = std::numeric_limits<double>::quiet_NaN();
    }
    return est;
}

PuritySeries purity_series(const ensemble::EnsembleResult& ens, const BinSpec& bins, double hbar,
                           int n_blocks) {
    BinSpec use = bins;

    // single widening pass when the requested range loses more than 2% of
    // the included samples at any recorded time
    bool widen = false;
    for (std::size_t t = 0; t < ens.times.size() && !widen; ++t) {
        const auto batch = ens.at(t);
        long outside = 0, total = 0;
        for (long i = 0; i < ens.n_traj; ++i) {
            if (batch.flagged[i]) continue;
            ++total;
            if (batch.q[i] < use.q_lo || batch.q[i] >= use.q_hi || batch.p[i] < use.p_lo ||
                batch.p[i] >= use.p_hi)
                ++outside;
        }
        if (total > 0 && double(outside) > 0.02 * double(total)) widen = true;
    }
    if (widen) {
        double q_lo = use.q_lo, q_hi = use.q_hi, p_lo = use.p_lo, p_hi = use.p_hi;
        for (std::size_t t = 0; t < ens.times.size(); ++t) {
            const auto batch = ens.at(t);
            for (long i = 0; i < ens.n_traj; ++i) {
                if (batch.flagged[i]) continue;
                q_lo = std::min(q_lo, batch.q[i]);
                q_hi = std::max(q_hi, batch.q[i]);
                p_lo = std::min(p_lo, batch.p[i]);
                p_hi = std::max(p_hi, batch.p[i]);
            }
        }
        const double pad_q = 0.01 * (q_hi - q_lo), pad_p = 0.01 * (p_hi - p_lo);
        use.q_lo = q_lo - pad_q;
        use.q_hi = q_hi + pad_q;
        use.p_lo = p_lo - pad_p;
        use.p_hi = p_hi + pad_p;
    }

    PuritySeries series;
    series.times = ens.times;
    series.chi.reserve(ens.times.size());
    for (std::size_t t = 0; t < ens.times.size(); ++t) {
        const auto batch = ens.at(t);
        const auto hist_a = reduce_and_bin(batch, use, Half::A, ens.one_norm, n_blocks);
        const auto hist_b = reduce_and_bin(batch, use, Half::B, ens.one_norm, n_blocks);
        const auto est = purity(hist_a, hist_b, hbar);
        series.chi.push_back(est.chi);
        series.chi_err.push_back(est.chi_err);
        series.chi_raw.push_back(est.chi_raw);
    }
    return series;
}

LyapunovSeries lyapunov(const SystemState& reference, const forcefield::ForceField& ff,
                        const md::IntegrationPlan& plan, rng::Engine& rng,
                        const LyapunovOptions& options) {
    if (options.delta0 < 0.0) throw std::invalid_argument("lyapunov: delta0 must be >= 0");

    SystemState twin = reference;
    if (options.delta0 > 0.0) {
        std::vector<Vec3> dir(twin.n_xe());
        double norm_sq = 0.0;
        for (auto& d : dir) {
            d = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
            norm_sq += norm2(d);
        }
        const double scale = options.delta0 / std::sqrt(norm_sq);
        for (std::size_t i = 0; i < twin.n_xe(); ++i) twin.xe_r[i] += scale * dir[i];
    }

    md::Propagator prop_ref(ff), prop_twin(ff);
    SystemState ref = reference;
    prop_ref.prepare(ref);
    prop_twin.prepare(twin);

    auto separation = [&]() {
        double d2 = 0.0;
        for (std::size_t i = 0; i < ref.n_xe(); ++i) {
            d2 += norm2(min_image(ref.xe_r[i] - twin.xe_r[i], ref.box_length));
            if (options.include_momenta) d2 += norm2(ref.xe_p[i] - twin.xe_p[i]);
        }
        return std::sqrt(d2);
    };

    LyapunovSeries series;
    const long n_rec = plan.n_records();
    series.times.reserve(n_rec);
    series.distance.reserve(n_rec);

    auto record = [&](double t) {
        const double d = separation();
        series.times.push_back(t);
        series.distance.push_back(d);
        series.log_distance.push_back(d > 0.0 ? std::log(d)
                                              : -std::numeric_limits<double>::infinity());
    };

    record(0.0);
    for (long s = 1; s <= plan.n_steps; ++s) {
        prop_ref.step(ref, plan.dt);
        prop_twin.step(twin, plan.dt);
        if (s % plan.record_stride == 0) record(double(s) * plan.dt);
    }

    // fit ln d(t) on [transient, saturation)
    const double d_sat = options.saturation_fraction * reference.box_length;
    std::size_t n_sat = series.distance.size();
    for (std::size_t i = 0; i < series.distance.size(); ++i)
        if (series.distance[i] >= d_sat) {
            n_sat = i;
            break;
        }
    std::size_t begin = std::size_t(options.transient_fraction * double(series.times.size()));
    if (begin >= n_sat) begin = 0;  // saturation before the nominal window: shrink from zero
    series.fit_begin = begin;
    series.fit_end = n_sat;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    long m = 0;
    for (std::size_t i = begin; i < n_sat; ++i) {
        if (!std::isfinite(series.log_distance[i])) continue;
        const double x = series.times[i], y = series.log_distance[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    if (m >= 3) {
        const double denom = double(m) * sxx - sx * sx;
        if (denom > 0.0) {
            series.exponent = (double(m) * sxy - sx * sy) / denom;
            const double ss_tot = syy - sy * sy / double(m);
            const double ss_res = ss_tot - series.exponent * (sxy - sx * sy / double(m));
            series.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
            series.fit_valid = true;
        }
    }
    return series;
}

Monitors monitors(const SystemState& state, md::Propagator& prop) {
    SystemState copy = state;
    prop.prepare(copy);
    Monitors m;
    m.kinetic_temperature = md::kinetic_temperature(copy, prop.m_i2());
    m.total_energy = prop.total_energy(copy);
    m.total_momentum = copy.total_momentum();
    return m;
}

void write_observables_csv(std::ostream& os, const ObservableSeries& series) {
    os << "# wigmd observables v1\n";
    os << "# columns: t_star,t_ps,chi,chi_err,chi_raw,d_lyap,ln_d_lyap,E_total,T_inst\n";
    char buf[64];
    auto put = [&](double v, bool comma) {
        std::snprintf(buf, sizeof buf, "%.12g", v);
        if (comma) os << ',';
        os << buf;
    };
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        put(t, false);
        put(t / series.eta * 1e12, true);
        put(i < series.purity.chi.size() ? series.purity.chi[i] : nan, true);
        put(i < series.purity.chi_err.size() ? series.purity.chi_err[i] : nan, true);
        put(i < series.purity.chi_raw.size() ? series.purity.chi_raw[i] : nan, true);
        const bool lyap = series.lyapunov && i < series.lyapunov->distance.size();
        put(lyap ? series.lyapunov->distance[i] : nan, true);
        put(lyap ? series.lyapunov->log_distance[i] : nan, true);
        put(i < series.mean_energy.size() ? series.mean_energy[i] : nan, true);
        put(i < series.mean_temperature.size() ? series.mean_temperature[i] : nan, true);
        os << '\n';
    }
}

} // namespace wigmd::observables
