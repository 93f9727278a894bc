#pragma once

// Conversion between atomic units and the trap's scaled variables
//
//   x = r / L,  sigma = L / beta4,  tau = t hbar / (2 m L^2),  gamma = 2 a_int / L,
//
// and the species data file reader.

#include <qrtrap/errors.hpp>
#include <qrtrap/keyvalue.hpp>
#include <qrtrap/quadrature.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace qrtrap {

/// Physical constants, CODATA 2018.
namespace constants {
/// Unified atomic mass unit in electron masses, m_u / m_e.
inline constexpr double electron_masses_per_amu = 1822.888486209;
/// Atomic unit of time, hbar / E_h, in seconds.
inline constexpr double atomic_time_seconds = 2.4188843265857e-17;
/// Boltzmann constant in hartree per kelvin.
inline constexpr double boltzmann_hartree_per_kelvin = 3.1668115634556e-6;
}  // namespace constants

/// Plus/minus errors in Bohr radii; symmetric when plus == minus.
struct Uncertainty {
    double plus = 0.0;
    double minus = 0.0;
};

struct SpeciesParams {
    std::string name;
    double mass = 0.0;   // electron masses
    double beta4 = 0.0;  // Bohr radii
    double a_int = 0.0;  // Bohr radii
    std::optional<Uncertainty> a_int_uncertainty;
    std::string channel;

    void validate() const {
        require(mass > 0.0, "species " + name + ": mass must be > 0");
        require(beta4 > 0.0, "species " + name + ": beta4 must be > 0");
    }
};

struct ScaledParams {
    double sigma = 0.0;
    double gamma = 0.0;
    double trap_radius_L = 0.0;
    std::optional<Uncertainty> gamma_uncertainty;
};

inline double scaled_sigma(double L, double beta4) {
    require(L > 0.0, "scaled_sigma: L must be > 0");
    require(beta4 > 0.0, "scaled_sigma: beta4 must be > 0");
    return L / beta4;
}

inline double radial_gamma(double a_int, double L) {
    require(L > 0.0, "radial_gamma: L must be > 0");
    return 2.0 * a_int / L;
}

/// t = 2 m L^2 tau in atomic time units, returned in seconds.
inline double scaled_time_to_seconds(double tau, double mass, double L) {
    require(mass > 0.0, "scaled_time_to_seconds: mass must be > 0");
    require(L > 0.0, "scaled_time_to_seconds: L must be > 0");
    return 2.0 * mass * L * L * tau * constants::atomic_time_seconds;
}

/// int_0^1 |psi'|^2 dx for psi = N x exp(-a x) normalized on [0, 1].
/// The jump at the truncation edge is not counted.
inline double initial_kinetic_energy_scaled(double a) {
    require(std::isfinite(a) && a > 0.0, "initial kinetic energy: a must be > 0");
    const double norm2 = integrate([a](double x) { return x * x * std::exp(-2.0 * a * x); }, 0.0, 1.0, 1e-14);
    const double kin = integrate(
        [a](double x) {
            const double d = (1.0 - a * x) * std::exp(-a * x);
            return d * d;
        },
        0.0, 1.0, 1e-12);
    return kin / norm2;
}

/// Scaled kinetic energy times hbar^2 / (2 m L^2), in hartree.
inline double initial_kinetic_energy_physical(double a, double mass, double L) {
    require(mass > 0.0, "initial kinetic energy: mass must be > 0");
    require(L > 0.0, "initial kinetic energy: L must be > 0");
    return initial_kinetic_energy_scaled(a) / (2.0 * mass * L * L);
}

inline ScaledParams scale(const SpeciesParams& s, double L) {
    s.validate();
    ScaledParams p{scaled_sigma(L, s.beta4), radial_gamma(s.a_int, L), L, std::nullopt};
    if (s.a_int_uncertainty) {
        // gamma is linear in a_int, so the errors scale by 2 / L.
        p.gamma_uncertainty = Uncertainty{2.0 * s.a_int_uncertainty->plus / L, 2.0 * s.a_int_uncertainty->minus / L};
    }
    return p;
}

// ---------------------------------------------------------------------------
// Species data file
//
//   format_version = 1
//   [Na]
//   mass_amu     = 22.98976928
//   beta4_au     = 1.494e4
//   a_int_au     = 65.3
//   a_int_err_au = 0.9          # or "+600 -350" for asymmetric errors
//   channel      = triplet      # singlet | triplet
//
// The section name is the species name.

inline constexpr int species_format_version = 1;

namespace detail {

inline Uncertainty parse_uncertainty(const kv::Entry& e, const std::string& source) {
    std::vector<std::string> parts;
    std::string token;
    for (char c : e.value) {
        if (c == ' ' || c == '\t' || c == ',') {
            if (!token.empty()) parts.push_back(std::move(token)), token.clear();
        } else {
            token += c;
        }
    }
    if (!token.empty()) parts.push_back(token);
    if (parts.size() == 1) {
        const double v = std::abs(kv::to_double(kv::Entry{e.key, parts[0], e.line}, source));
        return {v, v};
    }
    if (parts.size() == 2 && parts[0].front() == '+' && parts[1].front() == '-') {
        return {kv::to_double(kv::Entry{e.key, parts[0], e.line}, source),
                -kv::to_double(kv::Entry{e.key, parts[1], e.line}, source)};
    }
    throw ConfigError(source + ":" + std::to_string(e.line) + ": a_int_err_au expects 'v' or '+p -m'");
}

}  // namespace detail

inline std::vector<SpeciesParams> parse_species(const kv::Document& doc) {
    const auto& src = doc.source;
    const auto& global = doc.sections.front();
    const auto* version = global.find("format_version");
    if (!version) throw ConfigError(src + ": missing format_version");
    if (kv::to_integer(*version, src) != species_format_version)
        throw ConfigError(src + ": unsupported format_version " + version->value);
    for (const auto& e : global.entries)
        if (e.key != "format_version") throw ConfigError(src + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");

    std::vector<SpeciesParams> out;
    for (std::size_t i = 1; i < doc.sections.size(); ++i) {
        const auto& sec = doc.sections[i];
        SpeciesParams sp;
        sp.name = sec.name;
        bool have_mass = false, have_beta = false, have_a = false;
        for (const auto& e : sec.entries) {
            if (e.key == "mass_amu") {
                sp.mass = kv::to_double(e, src) * constants::electron_masses_per_amu;
                have_mass = true;
            } else if (e.key == "beta4_au") {
                sp.beta4 = kv::to_double(e, src);
                have_beta = true;
            } else if (e.key == "a_int_au") {
                sp.a_int = kv::to_double(e, src);
                have_a = true;
            } else if (e.key == "a_int_err_au") {
                sp.a_int_uncertainty = detail::parse_uncertainty(e, src);
            } else if (e.key == "channel") {
                if (e.value != "singlet" && e.value != "triplet")
                    throw ConfigError(src + ":" + std::to_string(e.line) + ": channel must be singlet or triplet");
                sp.channel = e.value;
            } else {
                throw ConfigError(src + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "'");
            }
        }
        if (!have_mass || !have_beta || !have_a)
            throw ConfigError(src + ": species [" + sec.name + "] needs mass_amu, beta4_au and a_int_au");
        try {
            sp.validate();
        } catch (const InvalidParameter& e) {
            throw ConfigError(src + ": " + e.what());
        }
        out.push_back(std::move(sp));
    }
    return out;
}

inline std::vector<SpeciesParams> load_species(const std::string& path) { return parse_species(kv::parse_file(path)); }

inline const SpeciesParams& find_species(const std::vector<SpeciesParams>& table, const std::string& name) {
    for (const auto& s : table)
        if (s.name == name) return s;
    std::string names;
    for (const auto& s : table) names += (names.empty() ? "" : ", ") + s.name;
    throw LookupError("unknown species '" + name + "'; available: " + names);
}

}  // namespace qrtrap
