#include "wigmd/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace wigmd::wigner {

// ---------------------------------------------------------------- parsing

static std::complex<double> parse_coefficient(const std::string& text) {
    if (!text.empty() && text.front() == '(') {
        if (text.back() != ')') throw std::invalid_argument("superposition: unbalanced '(' in " + text);
        const std::string inner = text.substr(1, text.size() - 2);
        const auto comma = inner.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("superposition: complex coefficient needs \"(re,im)\": " + text);
        std::size_t used = 0;
        const double re = std::stod(inner.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("superposition: bad real part in " + text);
        const double im = std::stod(inner.substr(comma + 1), &used);
        if (used != inner.size() - comma - 1)
            throw std::invalid_argument("superposition: bad imaginary part in " + text);
        return {re, im};
    }
    std::size_t used = 0;
    const double re = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("superposition: bad coefficient " + text);
    return {re, 0.0};
}

Superposition Superposition::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("superposition: empty specification");

    // split on '+' at top level, ignoring '+' inside parentheses or exponents
    std::vector<std::string> parts;
    std::string current;
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        const bool exponent_sign = (ch == '+') && i > 0 && (text[i - 1] == 'e' || text[i - 1] == 'E');
        if (ch == '+' && depth == 0 && !exponent_sign) {
            parts.push_back(current);
            current.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            current += ch;
        }
    }
    parts.push_back(current);

    Superposition state;
    for (const auto& part : parts) {
        if (part.empty()) throw std::invalid_argument("superposition: empty term in \"" + text + "\"");
        std::complex<double> coef{1.0, 0.0};
        std::string index_text = part;
        const auto star = part.rfind('*');
        if (star != std::string::npos) {
            coef = parse_coefficient(part.substr(0, star));
            index_text = part.substr(star + 1);
        }
        std::size_t used = 0;
        int n = -1;
        try {
            n = std::stoi(index_text, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("superposition: bad state index \"" + index_text + "\"");
        }
        if (used != index_text.size() || n < 0)
            throw std::invalid_argument("superposition: bad state index \"" + index_text + "\"");
        state.terms.push_back({n, coef});
    }
    state.normalize();
    return state;
}

void Superposition::normalize() {
    double s = 0.0;
    for (const auto& t : terms) s += std::norm(t.c);
    if (!(s > 0.0)) throw std::invalid_argument("superposition: zero norm");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& t : terms) t.c *= inv;
    normalized = true;
}

void Superposition::validate(int bound_states) const {
    if (terms.empty()) throw std::invalid_argument("superposition: no terms");
    double s = 0.0;
    for (const auto& t : terms) {
        if (t.n < 0 || t.n >= bound_states)
            throw std::invalid_argument("superposition: state index " + std::to_string(t.n) +
                                        " outside bound range [0, " + std::to_string(bound_states) + ")");
        s += std::norm(t.c);
    }
    for (std::size_t i = 0; i < terms.size(); ++i)
        for (std::size_t j = i + 1; j < terms.size(); ++j)
            if (terms[i].n == terms[j].n)
                throw std::invalid_argument("superposition: duplicate state index " +
                                            std::to_string(terms[i].n));
    if (std::abs(s - 1.0) > 1e-10)
        throw std::invalid_argument("superposition: coefficients not normalized");
}

int Superposition::max_index() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.n);
    return m;
}

std::string Superposition::name() const {
    std::string out;
    bool plain = true;
    for (const auto& t : terms)
        if (std::abs(t.c.imag()) > 1e-14 || std::abs(t.c.real() - terms[0].c.real()) > 1e-14)
            plain = false;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) out += '+';
        if (!plain) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "(%.6g,%.6g)*", terms[i].c.real(), terms[i].c.imag());
            out += buf;
        }
        out += std::to_string(terms[i].n);
    }
    return out;
}

// ---------------------------------------------------------------- grid ops

double WignerGrid::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * dq * dp;
}

double WignerGrid::purity_quadrature() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return 2.0 * M_PI * hbar * s * dq * dp;
}

double WignerGrid::min_value() const { return *std::min_element(values.begin(), values.end()); }
double WignerGrid::max_value() const { return *std::max_element(values.begin(), values.end()); }

double WignerGrid::negative_fraction() const {
    double neg = 0.0;
    for (double v : values)
        if (v < 0.0) neg -= v;
    return neg * dq * dp / one_norm;
}

void WignerGrid::write_csv(std::ostream& os) const {
    os << "# wigmd wigner grid v1\n";
    os << "# nq=" << q_axis.size() << " np=" << p_axis.size() << " dq=" << dq << " dp=" << dp
       << " hbar=" << hbar << "\n";
    os << "# q_axis values (cell centers), one line\n";
    for (std::size_t i = 0; i < q_axis.size(); ++i) os << (i ? "," : "") << q_axis[i];
    os << "\n# p_axis values (cell centers), one line\n";
    for (std::size_t i = 0; i < p_axis.size(); ++i) os << (i ? "," : "") << p_axis[i];
    os << "\n# W values, one row per q, columns ordered by p\n";
    for (std::size_t iq = 0; iq < q_axis.size(); ++iq) {
        for (std::size_t ip = 0; ip < p_axis.size(); ++ip)
            os << (ip ? "," : "") << values[iq * p_axis.size() + ip];
        os << "\n";
    }
}

void WignerGrid::write_binary(std::ostream& os) const {
    const char magic[8] = {'W', 'G', 'M', 'D', 'W', 'G', 'R', 'D'};
    const std::uint32_t version = 1;
    const std::uint64_t nq = q_axis.size(), np = p_axis.size();
    os.write(magic, 8);
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&nq), sizeof nq);
    os.write(reinterpret_cast<const char*>(&np), sizeof np);
    os.write(reinterpret_cast<const char*>(q_axis.data()), std::streamsize(nq * sizeof(double)));
    os.write(reinterpret_cast<const char*>(p_axis.data()), std::streamsize(np * sizeof(double)));
    os.write(reinterpret_cast<const char*>(values.data()), std::streamsize(values.size() * sizeof(double)));
}

// ---------------------------------------------------------------- transform

WignerGrid build_wigner(const morse::MorseSpec& spec, const Superposition& state,
                        const GridSpec& grid) {
    spec.validate();
    Superposition st = state;
    if (!st.normalized) st.normalize();
    st.validate(morse::bound_count(spec));

    const int nq = grid.nq, np = grid.np;
    if (nq < 8 || np < 8) throw std::invalid_argument("build_wigner: grid too small");

    double q_lo = grid.q_lo, q_hi = grid.q_hi;
    if (std::isnan(q_lo) || std::isnan(q_hi)) {
        q_lo = spec.q0 - 1.5 / spec.beta;
        q_hi = spec.q0 + 6.0 / spec.beta;
    }
    double p_max = grid.p_max;
    if (std::isnan(p_max)) {
        const double p_quantum = std::sqrt(spec.mu * spec.hbar * spec.omega());
        const double e_top = morse::eigenenergy(spec, st.max_index());
        p_max = std::max(6.0 * p_quantum, std::sqrt(2.0 * spec.mu * e_top) + 4.0 * p_quantum);
    }

    // wavefunction tabulated at 4x the q resolution so cell centers and the
    // y-quadrature offsets both land on tabulation nodes
    const int fine_n = 4 * nq + 1;
    std::vector<double> fine_grid(fine_n);
    const double h = (q_hi - q_lo) / (fine_n - 1);
    for (int m = 0; m < fine_n; ++m) fine_grid[m] = q_lo + h * m;

    std::vector<std::complex<double>> psi(fine_n, {0.0, 0.0});
    for (const auto& term : st.terms) {
        const auto amp = morse::eigenfunction(spec, term.n, fine_grid);
        for (int m = 0; m < fine_n; ++m) psi[m] += term.c * amp[m];
    }

    double support_norm = 0.0;
    for (int m = 0; m + 1 < fine_n; ++m)
        support_norm += 0.5 * (std::norm(psi[m]) + std::norm(psi[m + 1])) * h;
    if (std::abs(support_norm - 1.0) > 1e-4)
        throw std::runtime_error("build_wigner: wavefunction support not covered, norm deficit = " +
                                 std::to_string(1.0 - support_norm));

    WignerGrid out;
    out.hbar = spec.hbar;
    out.dq = (q_hi - q_lo) / nq;
    out.dp = 2.0 * p_max / np;
    out.q_axis.resize(nq);
    out.p_axis.resize(np);
    for (int i = 0; i < nq; ++i) out.q_axis[i] = q_lo + (i + 0.5) * out.dq;
    for (int k = 0; k < np; ++k) out.p_axis[k] = -p_max + (k + 0.5) * out.dp;
    out.values.assign(std::size_t(nq) * np, 0.0);

    const int max_offset = 512;  // y-quadrature half-width in fine-grid steps
    const double prefactor = h / (M_PI * spec.hbar);
    std::vector<std::complex<double>> f(2 * max_offset + 1);

    double imag_residue = 0.0;
    for (int i = 0; i < nq; ++i) {
        const int a = 4 * i + 2;  // fine index of this cell center
        const int reach = std::min({max_offset, a, fine_n - 1 - a});
        for (int j = -reach; j <= reach; ++j)
            f[j + reach] = std::conj(psi[a + j]) * psi[a - j];

        for (int k = 0; k < np; ++k) {
            const double theta = 2.0 * out.p_axis[k] * h / spec.hbar;
            const std::complex<double> rot{std::cos(theta), std::sin(theta)};
            // start at j = -reach and advance the phase by recurrence,
            // re-synchronizing periodically against accumulated rounding
            std::complex<double> phase{std::cos(theta * -reach), std::sin(theta * -reach)};
            std::complex<double> acc{0.0, 0.0};
            for (int j = -reach; j <= reach; ++j) {
                const double w = (j == -reach || j == reach) ? 0.5 : 1.0;
                acc += w * f[j + reach] * phase;
                phase *= rot;
                if (((j + reach) & 127) == 127)
                    phase = {std::cos(theta * (j + 1)), std::sin(theta * (j + 1))};
            }
            out.values[std::size_t(i) * np + k] = prefactor * acc.real();
            imag_residue = std::max(imag_residue, std::abs(prefactor * acc.imag()));
        }
    }
    out.max_imag_residue = imag_residue;

    double one = 0.0;
    for (double v : out.values) one += std::abs(v);
    out.one_norm = one * out.dq * out.dp;
    return out;
}

// ---------------------------------------------------------------- sampling

WignerSampler::WignerSampler(const WignerGrid& grid)
    : nq_(int(grid.q_axis.size())),
      np_(int(grid.p_axis.size())),
      dq_(grid.dq),
      dp_(grid.dp) {
    q0_ = grid.q_axis.front() - 0.5 * dq_;
    p0_ = grid.p_axis.front() - 0.5 * dp_;

    cdf_.resize(grid.values.size());
    cell_sign_.resize(grid.values.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < grid.values.size(); ++c) {
        acc += std::abs(grid.values[c]);
        cdf_[c] = acc;
        cell_sign_[c] = grid.values[c] < 0.0 ? -1.0f : 1.0f;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("WignerSampler: all-zero grid");
    for (auto& v : cdf_) v /= acc;
    cdf_.back() = 1.0;

    one_norm_ = grid.one_norm;
    negative_fraction_ = grid.negative_fraction();
}

PhasePointSigned WignerSampler::sample(rng::Engine& rng) const {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t cell = std::size_t(it - cdf_.begin());
    const int iq = int(cell / np_);
    const int ip = int(cell % np_);
    PhasePointSigned pt;
    pt.q = q0_ + (iq + rng.uniform()) * dq_;
    pt.p = p0_ + (ip + rng.uniform()) * dp_;
    pt.sign = cell_sign_[cell] < 0.0f ? -1 : 1;
    return pt;
}

std::vector<PhasePointSigned> WignerSampler::sample_many(long count, rng::Engine& rng) const {
    if (count < 1) throw std::invalid_argument("WignerSampler: count must be >= 1");
    std::vector<PhasePointSigned> out;
    out.reserve(std::size_t(count));
    for (long i = 0; i < count; ++i) out.push_back(sample(rng));
    return out;
}

} // namespace wigmd::wigner
