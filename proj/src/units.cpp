#include "wigmd/units.hpp"

#include <cmath>
#include <stdexcept>

namespace wigmd::units {

double wavenumber_to_joule(double cm1) { return cm1 * hc_joule_cm; }
double kelvin_to_joule(double kelvin) { return kelvin * k_boltzmann; }
double wavenumber_to_kelvin(double cm1) { return wavenumber_to_joule(cm1) / k_boltzmann; }

void PhysicalConstants::validate() const {
    const double entries[] = {eps_xexe_cm1, eps_xexe_K, sigma_xexe_A, eps_i2i2_cm1,
                              eps_i2i2_K,   sigma_i2i2_A, m_xe_g, m_i2_g,
                              morse_D_cm1,  morse_beta_invA};
    for (double v : entries)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("physical constants must be positive and finite");

    // cm^-1 and Kelvin forms of the well depths must agree to 0.5%
    const double xe_K = wavenumber_to_kelvin(eps_xexe_cm1);
    const double i2_K = wavenumber_to_kelvin(eps_i2i2_cm1);
    if (std::abs(xe_K / eps_xexe_K - 1.0) > 5e-3 || std::abs(i2_K / eps_i2i2_K - 1.0) > 5e-3)
        throw std::invalid_argument("cm^-1 and Kelvin well depths disagree beyond 0.5%");
}

ReducedConstants ReducedConstants::from(const PhysicalConstants& pc) {
    pc.validate();
    const double eps = pc.eps_xexe_J();
    const double sigma = pc.sigma_xexe_m();
    const double mass = pc.m_xe_kg();

    ReducedConstants rc;
    rc.m_i2 = pc.m_i2_g / pc.m_xe_g;
    rc.mu_i2 = rc.m_i2 / 4.0;
    rc.sigma_i2 = pc.sigma_i2i2_A / pc.sigma_xexe_A;
    rc.eps_i2 = pc.eps_i2i2_K / pc.eps_xexe_K;
    rc.D = wavenumber_to_joule(pc.morse_D_cm1) / eps;
    rc.beta = pc.morse_beta_invA * pc.sigma_xexe_A;
    rc.hbar = hbar_si / std::sqrt(mass * sigma * sigma * eps);
    rc.eta = std::sqrt(eps / (mass * sigma * sigma));
    return rc;
}

double ReducedConstants::eps_i2xe() const { return std::sqrt(eps_i2); }
double ReducedConstants::sigma0_i2xe() const { return 0.5 * (1.0 + sigma_i2); }

Kind kind_from_name(const std::string& name) {
    if (name == "length") return Kind::length;
    if (name == "time") return Kind::time;
    if (name == "frequency") return Kind::frequency;
    if (name == "density") return Kind::density;
    if (name == "temperature") return Kind::temperature;
    if (name == "energy") return Kind::energy;
    if (name == "mass") return Kind::mass;
    throw std::invalid_argument("unknown unit kind: " + name);
}

double reduce(const PhysicalConstants& pc, double value, Kind kind) {
    if (!std::isfinite(value)) throw std::invalid_argument("reduce: value must be finite");
    const double eps = pc.eps_xexe_J();
    const double sigma = pc.sigma_xexe_m();
    const double mass = pc.m_xe_kg();
    const double eta = std::sqrt(eps / (mass * sigma * sigma));
    switch (kind) {
        case Kind::length: return value / sigma;
        case Kind::time: return value * eta;
        case Kind::frequency: return value / eta;
        case Kind::density: {
            // mass density g/cm^3 -> number density -> sigma^3 rho
            const double sigma_cm = pc.sigma_xexe_A * 1e-8;
            return (value / pc.m_xe_g) * sigma_cm * sigma_cm * sigma_cm;
        }
        case Kind::temperature: return kelvin_to_joule(value) / eps;
        case Kind::energy: return value / eps;
        case Kind::mass: return value / mass;
    }
    throw std::invalid_argument("reduce: unknown unit kind");
}

double expand(const PhysicalConstants& pc, double value, Kind kind) {
    if (!std::isfinite(value)) throw std::invalid_argument("expand: value must be finite");
    const double eps = pc.eps_xexe_J();
    const double sigma = pc.sigma_xexe_m();
    const double mass = pc.m_xe_kg();
    const double eta = std::sqrt(eps / (mass * sigma * sigma));
    switch (kind) {
        case Kind::length: return value * sigma;
        case Kind::time: return value / eta;
        case Kind::frequency: return value * eta;
        case Kind::density: {
            const double sigma_cm = pc.sigma_xexe_A * 1e-8;
            return value * pc.m_xe_g / (sigma_cm * sigma_cm * sigma_cm);
        }
        case Kind::temperature: return value * eps / k_boltzmann;
        case Kind::energy: return value * eps;
        case Kind::mass: return value * mass;
    }
    throw std::invalid_argument("expand: unknown unit kind");
}

} // namespace wigmd::units
