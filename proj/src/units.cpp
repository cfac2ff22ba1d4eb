#include "rydpol/units.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydpol {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::domain_error(std::string(name) + " must be positive and finite");
}

}  // namespace

ScalingLaw parse_scaling_law(std::string_view name) {
    if (name == "c6_n11") return ScalingLaw::c6_n11;
    if (name == "dipole_n2") return ScalingLaw::dipole_n2;
    if (name == "lifetime_n3") return ScalingLaw::lifetime_n3;
    if (name == "qubit_fom_n5") return ScalingLaw::qubit_fom_n5;
    throw std::invalid_argument("unknown scaling law: " + std::string(name));
}

std::string_view to_string(ScalingLaw law) {
    switch (law) {
        case ScalingLaw::c6_n11: return "c6_n11";
        case ScalingLaw::dipole_n2: return "dipole_n2";
        case ScalingLaw::lifetime_n3: return "lifetime_n3";
        case ScalingLaw::qubit_fom_n5: return "qubit_fom_n5";
    }
    return "unknown";
}

double optical_blockade_radius(double c6_ghz_um6, double eit_width_mhz) {
    require_positive(std::abs(c6_ghz_um6), "c6");
    require_positive(eit_width_mhz, "eit_width");
    return std::pow(std::abs(c6_ghz_um6) * constants::kGhzToMhz / eit_width_mhz, 1.0 / 6.0);
}

double microwave_blockade_radius(double c3_ghz_um3, double omega_mu_mhz) {
    require_positive(std::abs(c3_ghz_um3), "c3");
    require_positive(omega_mu_mhz, "omega_mu");
    return std::cbrt(std::abs(c3_ghz_um3) * constants::kGhzToMhz / omega_mu_mhz);
}

double dipole_interaction(double c3_ghz_um3, double r_um) {
    require_positive(r_um, "r");
    return std::abs(c3_ghz_um3) * constants::kGhzToMhz / (r_um * r_um * r_um);
}

double motional_dephasing_time(const ExperimentConfig& config) {
    require_positive(config.temperature, "temperature");
    require_positive(config.atom_mass, "atom_mass");
    require_positive(config.signal_wavelength, "signal_wavelength");
    require_positive(config.control_wavelength, "control_wavelength");

    // Opposed beams: |k_s - k_c|, in 1/m.
    const double k_eff = 2.0 * constants::kPi *
                         std::abs(1.0 / config.signal_wavelength - 1.0 / config.control_wavelength) *
                         1.0e9;
    if (k_eff == 0.0) return std::numeric_limits<double>::infinity();

    const double mass_kg = config.atom_mass * constants::kAtomicMassUnit;
    const double v_rms = std::sqrt(constants::kBoltzmann * config.temperature * 1.0e-6 / mass_kg);
    return 1.0e6 / (k_eff * v_rms);
}

double rydberg_scaling(int n, int n_ref, double value_ref, ScalingLaw law) {
    if (n < 10 || n_ref < 10)
        throw std::domain_error("principal quantum numbers below 10 are outside the scaling regime");
    double power = 0.0;
    switch (law) {
        case ScalingLaw::c6_n11: power = 11.0; break;
        case ScalingLaw::dipole_n2: power = 2.0; break;
        case ScalingLaw::lifetime_n3: power = 3.0; break;
        case ScalingLaw::qubit_fom_n5: power = 5.0; break;
    }
    return value_ref * std::pow(static_cast<double>(n) / n_ref, power);
}

double characteristic_interaction(const ExperimentConfig& config) {
    const double r_o = optical_blockade_radius(config.pair.c6, config.eit_width);
    return dipole_interaction(config.pair.c3, r_o);
}

void validate(const ExperimentConfig& c) {
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("config field '") + field +
                                        "' must be strictly positive");
    };
    positive(c.cloud_wz, "cloud_wz");
    positive(c.cloud_wr, "cloud_wr");
    positive(c.temperature, "temperature");
    positive(c.atom_mass, "atom_mass");
    positive(c.signal_wavelength, "signal_wavelength");
    positive(c.control_wavelength, "control_wavelength");
    positive(c.trap_wavelength, "trap_wavelength");
    positive(c.omega_c, "omega_c");
    positive(c.omega_s, "omega_s");
    positive(c.eit_width, "eit_width");
    if (c.n_principal <= 0)
        throw std::invalid_argument("config field 'n_principal' must be strictly positive");
    positive(c.repetition_period, "repetition_period");
    positive(c.storage_time, "storage_time");
    positive(c.mean_input_photons, "mean_input_photons");
    if (!(c.detection_efficiency > 0.0 && c.detection_efficiency <= 1.0))
        throw std::invalid_argument("config field 'detection_efficiency' must lie in (0, 1]");
    if (!(c.background_rate >= 0.0) || !std::isfinite(c.background_rate))
        throw std::invalid_argument("config field 'background_rate' must be non-negative");
    const auto& w = c.retrieval_window;
    if (!(w.start >= 0.0 && w.start < w.end && w.end < c.repetition_period))
        throw std::invalid_argument(
            "config field 'retrieval_window' must satisfy 0 <= start < end < repetition_period");
    if (!(c.write_efficiency > 0.0 && c.write_efficiency <= 1.0))
        throw std::invalid_argument("config field 'write_efficiency' must lie in (0, 1]");
    if (!(c.retrieval_efficiency > 0.0 && c.retrieval_efficiency <= 1.0))
        throw std::invalid_argument("config field 'retrieval_efficiency' must lie in (0, 1]");
    positive(c.directional_ratio_min, "directional_ratio_min");
    if (c.pair.c6 == 0.0 || !std::isfinite(c.pair.c6))
        throw std::invalid_argument("config field 'pair_coefficients.c6' must be nonzero");
    if (c.pair.c3 == 0.0 || !std::isfinite(c.pair.c3))
        throw std::invalid_argument("config field 'pair_coefficients.c3' must be nonzero");
    if (!std::isfinite(c.pair.dipole_moment))
        throw std::invalid_argument("config field 'pair_coefficients.dipole_moment' must be finite");
}

std::vector<std::string> config_warnings(const ExperimentConfig& c) {
    std::vector<std::string> out;
    const double r_o = optical_blockade_radius(c.pair.c6, c.eit_width);
    const double lambda_um = c.signal_wavelength * 1.0e-3;
    if (r_o < c.directional_ratio_min * lambda_um)
        out.push_back("blockade radius " + std::to_string(r_o) +
                      " um is not large compared to the signal wavelength; collective readout "
                      "may not be directional");
    return out;
}

}  // namespace rydpol
