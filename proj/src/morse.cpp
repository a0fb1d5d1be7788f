#include "wigmd/morse.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace wigmd::morse {

MorseSpec MorseSpec::i2(const units::ReducedConstants& rc) {
    return MorseSpec{rc.D, rc.beta, 0.0, rc.mu_i2, rc.hbar};
}

void MorseSpec::validate() const {
    if (!(D > 0.0) || !(beta > 0.0) || !(mu > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("MorseSpec: D, beta, mu, hbar must be positive");
    if (!(lambda() > 0.5))
        throw std::invalid_argument("MorseSpec: lambda <= 1/2, no bound state");
}

double MorseSpec::lambda() const { return std::sqrt(2.0 * mu * D) / (beta * hbar); }
double MorseSpec::omega() const { return std::sqrt(2.0 * beta * beta * D / mu); }
double MorseSpec::period() const { return 2.0 * M_PI / omega(); }

double potential(const MorseSpec& spec, double q) {
    const double u = 1.0 - std::exp(-spec.beta * (q - spec.q0));
    return spec.D * u * u;
}

double force(const MorseSpec& spec, double q) {
    const double e = std::exp(-spec.beta * (q - spec.q0));
    return -2.0 * spec.D * spec.beta * e * (1.0 - e);
}

int bound_count(const MorseSpec& spec) {
    const int n = int(std::floor(spec.lambda() - 0.5));
    if (n < 1) throw std::domain_error("Morse potential has no bound state (lambda <= 1/2)");
    return n;
}

double eigenenergy(const MorseSpec& spec, int n) {
    if (n < 0 || n >= bound_count(spec))
        throw std::domain_error("Morse eigenenergy: n = " + std::to_string(n) +
                                " outside bound range [0, " + std::to_string(bound_count(spec)) + ")");
    const double hw = spec.hbar * spec.omega() * (n + 0.5);
    return hw - hw * hw / (4.0 * spec.D);
}

// Generalized Laguerre polynomial L_n^{(a)}(x) by the three-term recurrence.
// Degrees stay small (bound-state indices) so plain double arithmetic holds.
static double laguerre(int n, double a, double x) {
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

std::vector<double> eigenfunction(const MorseSpec& spec, int n, std::span<const double> q_grid) {
    if (n < 0 || n >= bound_count(spec))
        throw std::domain_error("Morse eigenfunction: n outside bound range");
    if (q_grid.size() < 8)
        throw std::invalid_argument("Morse eigenfunction: grid too small");

    const double lam = spec.lambda();
    const double s = 2.0 * lam - 2.0 * n - 1.0;  // Laguerre order parameter
    // N_n = sqrt(beta n! s / Gamma(2 lambda - n)); kept in log space since
    // Gamma(2 lambda - n) overflows for the I2 well (lambda ~ 117).
    const double log_norm = 0.5 * (std::log(spec.beta) + std::lgamma(n + 1.0) + std::log(s) -
                                   std::lgamma(2.0 * lam - n));

    std::vector<double> psi(q_grid.size());
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        const double xi = 2.0 * lam * std::exp(-spec.beta * (q_grid[i] - spec.q0));
        const double lag = laguerre(n, s, xi);
        const double log_mag = log_norm + (lam - n - 0.5) * std::log(xi) - 0.5 * xi;
        psi[i] = (lag < 0 ? -1.0 : 1.0) * std::exp(log_mag + std::log(std::abs(lag) + 1e-300));
    }

    // trapezoidal norm check; the analytic normalization is exact, so a
    // deficit here means the grid misses part of the state
    double norm = 0.0;
    for (std::size_t i = 0; i + 1 < q_grid.size(); ++i)
        norm += 0.5 * (psi[i] * psi[i] + psi[i + 1] * psi[i + 1]) * (q_grid[i + 1] - q_grid[i]);
    if (std::abs(norm - 1.0) > 1e-4)
        throw std::runtime_error("Morse eigenfunction: grid misses norm, deficit = " +
                                 std::to_string(1.0 - norm));
    return psi;
}

std::vector<double> default_grid(const MorseSpec& spec, int points) {
    const double lo = spec.q0 - 1.5 / spec.beta;
    const double hi = spec.q0 + 6.0 / spec.beta;
    std::vector<double> grid(points);
    const double h = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) grid[i] = lo + h * i;
    return grid;
}

} // namespace wigmd::morse
