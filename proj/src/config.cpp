#include "rydpol/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <stdexcept>

namespace rydpol {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& where) {
    if (!doc.is_object()) throw std::invalid_argument(where + " must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known.contains(key))
            throw std::invalid_argument("unknown config key '" + where + key + "'");
    }
}

template <typename T>
void read(const json& doc, const char* key, T& field) {
    if (auto it = doc.find(key); it != doc.end()) {
        try {
            field = it->get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument(std::string("config field '") + key + "' has the wrong type");
        }
    }
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    return json{
        {"cloud_wz", c.cloud_wz},
        {"cloud_wr", c.cloud_wr},
        {"temperature", c.temperature},
        {"atom_mass", c.atom_mass},
        {"signal_wavelength", c.signal_wavelength},
        {"control_wavelength", c.control_wavelength},
        {"trap_wavelength", c.trap_wavelength},
        {"omega_c", c.omega_c},
        {"omega_s", c.omega_s},
        {"eit_width", c.eit_width},
        {"n_principal", c.n_principal},
        {"repetition_period", c.repetition_period},
        {"storage_time", c.storage_time},
        {"retrieval_window", {c.retrieval_window.start, c.retrieval_window.end}},
        {"detection_efficiency", c.detection_efficiency},
        {"background_rate", c.background_rate},
        {"mean_input_photons", c.mean_input_photons},
        {"write_efficiency", c.write_efficiency},
        {"retrieval_efficiency", c.retrieval_efficiency},
        {"directional_ratio_min", c.directional_ratio_min},
        {"pair_coefficients",
         {{"c6", c.pair.c6}, {"c3", c.pair.c3}, {"dipole_moment", c.pair.dipole_moment}}},
    };
}

ExperimentConfig config_from_json(const json& doc) {
    static const std::set<std::string> known = {
        "cloud_wz", "cloud_wr", "temperature", "atom_mass", "signal_wavelength",
        "control_wavelength", "trap_wavelength", "omega_c", "omega_s", "eit_width",
        "n_principal", "repetition_period", "storage_time", "retrieval_window",
        "detection_efficiency", "background_rate", "mean_input_photons", "write_efficiency",
        "retrieval_efficiency", "directional_ratio_min", "pair_coefficients"};
    reject_unknown(doc, known, "");

    ExperimentConfig c;
    read(doc, "cloud_wz", c.cloud_wz);
    read(doc, "cloud_wr", c.cloud_wr);
    read(doc, "temperature", c.temperature);
    read(doc, "atom_mass", c.atom_mass);
    read(doc, "signal_wavelength", c.signal_wavelength);
    read(doc, "control_wavelength", c.control_wavelength);
    read(doc, "trap_wavelength", c.trap_wavelength);
    read(doc, "omega_c", c.omega_c);
    read(doc, "omega_s", c.omega_s);
    read(doc, "eit_width", c.eit_width);
    read(doc, "n_principal", c.n_principal);
    read(doc, "repetition_period", c.repetition_period);
    read(doc, "storage_time", c.storage_time);
    read(doc, "detection_efficiency", c.detection_efficiency);
    read(doc, "background_rate", c.background_rate);
    read(doc, "mean_input_photons", c.mean_input_photons);
    read(doc, "write_efficiency", c.write_efficiency);
    read(doc, "retrieval_efficiency", c.retrieval_efficiency);
    read(doc, "directional_ratio_min", c.directional_ratio_min);

    if (auto it = doc.find("retrieval_window"); it != doc.end()) {
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
            throw std::invalid_argument("config field 'retrieval_window' must be [start, end]");
        c.retrieval_window = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    }
    if (auto it = doc.find("pair_coefficients"); it != doc.end()) {
        reject_unknown(*it, {"c6", "c3", "dipole_moment"}, "pair_coefficients.");
        read(*it, "c6", c.pair.c6);
        read(*it, "c3", c.pair.c3);
        read(*it, "dipole_moment", c.pair.dipole_moment);
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

ExperimentConfig resolve_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_config(explicit_path);
    if (const char* env = std::getenv("RYDPOL_CONFIG"); env != nullptr && *env != '\0')
        return load_config(env);
    ExperimentConfig defaults;
    validate(defaults);
    return defaults;
}

}  // namespace rydpol
