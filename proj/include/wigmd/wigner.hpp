#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "wigmd/morse.hpp"
#include "wigmd/rng.hpp"

namespace wigmd::wigner {

struct Term {
    int n;
    std::complex<double> c;
};

// Finite superposition of Morse bound states.
struct Superposition {
    std::vector<Term> terms;
    bool normalized = false;

    // "0+2", "5+8", optionally with coefficients: "0.6*0+0.8*2",
    // complex as "(re,im)*n". Equal weights when coefficients are omitted.
    static Superposition parse(const std::string& text);

    void normalize();
    void validate(int bound_states) const;  // throws std::invalid_argument
    int max_index() const;
    std::string name() const;
};

struct GridSpec {
    int nq = 512;
    int np = 512;
    // NaN means derive from the Morse spec / superposition
    double q_lo = std::numeric_limits<double>::quiet_NaN();
    double q_hi = std::numeric_limits<double>::quiet_NaN();
    double p_max = std::numeric_limits<double>::quiet_NaN();
};

// Tabulated Wigner function W(q,p) of a superposition; values may be negative.
// Axes hold cell centers; values are row-major with q as the outer index.
struct WignerGrid {
    std::vector<double> q_axis, p_axis;
    std::vector<double> values;
    double dq = 0.0, dp = 0.0;
    double hbar = 0.0;
    double one_norm = 0.0;         // integral of |W|
    double max_imag_residue = 0.0; // largest |Im| leaked by the transform

    double at(int iq, int ip) const { return values[std::size_t(iq) * p_axis.size() + ip]; }
    double integral() const;                 // sum W dq dp
    double purity_quadrature() const;        // 2 pi hbar sum W^2 dq dp
    double min_value() const;
    double max_value() const;
    double negative_fraction() const;        // integral of |W| over W<0, over one_norm

    void write_csv(std::ostream& os) const;
    void write_binary(std::ostream& os) const;
};

// Wigner transform W(q,p) = (1/pi hbar) Int psi*(q+y) psi(q-y) exp(2ipy/hbar) dy
// of the full superposition (cross terms included), evaluated by trapezoidal
// quadrature on a tabulated wavefunction.
// Throws std::runtime_error when the grid misses wavefunction support.
WignerGrid build_wigner(const morse::MorseSpec& spec, const Superposition& state,
                        const GridSpec& grid = {});

struct PhasePointSigned {
    double q, p;
    int sign;  // +1 or -1
};

// Draws phase points with probability proportional to |W|; each carries the
// sign of W at its cell. Positions are jittered uniformly within the cell.
class WignerSampler {
public:
    explicit WignerSampler(const WignerGrid& grid);  // throws on all-zero grid

    PhasePointSigned sample(rng::Engine& rng) const;
    std::vector<PhasePointSigned> sample_many(long count, rng::Engine& rng) const;

    double one_norm() const { return one_norm_; }
    double negative_fraction() const { return negative_fraction_; }

private:
    std::vector<double> cdf_;
    std::vector<float> cell_sign_;
    int nq_, np_;
    double q0_, p0_, dq_, dp_;
    double one_norm_;
    double negative_fraction_;
};

} // namespace wigmd::wigner
