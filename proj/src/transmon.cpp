#include "flipkit/transmon.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/numerics.hpp"

namespace flipkit::transmon {

using constants::planck;

void TransmonParams::validate() const {
    if (!(junction_capacitance > 0.0) || !(shunt_capacitance > 0.0)) {
        throw DomainError("junction and shunt capacitances must be positive");
    }
    if (!(junction_inductance > 0.0)) throw DomainError("junction inductance must be positive");
    if (!(flux_bias >= 0.0) || !(flux_bias < 1.0)) {
        throw DomainError(fmt::format("flux bias {} outside [0, 1)", flux_bias));
    }
    if (effective_capacitance && !(*effective_capacitance > 0.0)) {
        throw DomainError("effective capacitance must be positive");
    }
}

double TransmonParams::total_capacitance() const {
    return effective_capacitance.value_or(junction_capacitance + shunt_capacitance);
}

bool EnergyScales::transmon_regime() const noexcept {
    return josephson_energy >= kTransmonRegimeRatio * charging_energy;
}

double charging_energy(double total_capacitance) {
    if (!(total_capacitance > 0.0)) throw DomainError("total capacitance must be positive");
    const double e = constants::elementary_charge;
    return 0.5 * e * e / total_capacitance;
}

double josephson_energy(double junction_inductance) {
    if (!(junction_inductance > 0.0)) throw DomainError("junction inductance must be positive");
    const double reduced_flux = constants::flux_quantum / (2.0 * constants::pi);
    return reduced_flux * reduced_flux / junction_inductance;
}

double squid_josephson_energy(double ej_max, double flux_bias) {
    if (!(ej_max > 0.0)) throw DomainError("E_J,max must be positive");
    const double c = std::cos(constants::pi * flux_bias);
    // cos(pi/2) is 6e-17 in floating point; the half-flux point is exactly zero.
    return std::abs(c) < 1e-15 ? 0.0 : ej_max * std::abs(c);
}

EnergyScales energy_scales(const TransmonParams& params) {
    params.validate();
    const double ej_max = josephson_energy(params.junction_inductance);
    const double ej = params.flux_bias == 0.0 ? ej_max : squid_josephson_energy(ej_max, params.flux_bias);
    return {charging_energy(params.total_capacitance()), ej};
}

double transmon_frequency(const EnergyScales& scales) {
    const double ec = scales.charging_energy;
    const double ej = scales.josephson_energy;
    if (!(ec > 0.0) || !(ej >= 0.0)) throw DomainError("energy scales must be positive");
    return (std::sqrt(8.0 * ec * ej) - ec) / planck;
}

double anharmonicity(const EnergyScales& scales) {
    if (!(scales.charging_energy > 0.0)) throw DomainError("charging energy must be positive");
    return -scales.charging_energy / planck;
}

double ej_ec_ratio(const EnergyScales& scales) {
    if (!(scales.charging_energy > 0.0)) throw DomainError("charging energy must be positive");
    return scales.josephson_energy / scales.charging_energy;
}

std::vector<double> cpb_spectrum(const EnergyScales& scales, double offset_charge, int charge_cutoff, int n_levels) {
    if (charge_cutoff < 10) throw DomainError(fmt::format("charge cutoff {} below minimum 10", charge_cutoff));
    const int dim = 2 * charge_cutoff + 1;
    if (n_levels < 1 || n_levels > dim) {
        throw DomainError(fmt::format("n_levels {} must lie in [1, {}]", n_levels, dim));
    }
    if (!(scales.charging_energy > 0.0) || !(scales.josephson_energy >= 0.0)) {
        throw DomainError("energy scales must be positive");
    }

    const auto n = static_cast<std::size_t>(dim);
    numerics::SymmetricMatrix h(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double charge = static_cast<double>(static_cast<int>(k) - charge_cutoff) - offset_charge;
        h.at(k, k) = 4.0 * scales.charging_energy * charge * charge;
        if (k + 1 < n) h.at(k, k + 1) = -0.5 * scales.josephson_energy;
    }
    const numerics::EigenSystem eig = numerics::eig_sym(h);

    const auto& top = eig.vectors[static_cast<std::size_t>(n_levels - 1)];
    const double boundary_weight = top.front() * top.front() + top.back() * top.back();
    if (boundary_weight > 1e-8) {
        throw CutoffError(fmt::format("charge cutoff N={} too small: level {} has boundary weight {:.3e}",
                                      charge_cutoff, n_levels - 1, boundary_weight));
    }
    return {eig.values.begin(), eig.values.begin() + n_levels};
}

OracleTransitions cpb_transitions(const EnergyScales& scales, double offset_charge, int charge_cutoff) {
    const auto e = cpb_spectrum(scales, offset_charge, charge_cutoff, 3);
    const double f01 = (e[1] - e[0]) / planck;
    const double f12 = (e[2] - e[1]) / planck;
    return {f01, f12, f12 - f01};
}

}  // namespace flipkit::transmon
