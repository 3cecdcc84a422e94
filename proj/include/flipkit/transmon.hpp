#pragma once

#include <optional>
#include <vector>

namespace flipkit::transmon {

struct TransmonParams {
    double junction_capacitance = 0.0;  // C_j, F
    double shunt_capacitance = 0.0;     // C_s, F
    double junction_inductance = 0.0;   // L_j, H
    double flux_bias = 0.0;             // Phi / Phi0, in [0, 1)
    // Replaces C_j + C_s in the charging energy when set (calibration studies).
    std::optional<double> effective_capacitance;

    void validate() const;
    double total_capacitance() const;
};

struct EnergyScales {
    double charging_energy;   // E_c, J
    double josephson_energy;  // E_J, J

    // E_J / E_c >= 20
    bool transmon_regime() const noexcept;
};

inline constexpr int kDefaultChargeCutoff = 30;
inline constexpr double kTransmonRegimeRatio = 20.0;

double charging_energy(double total_capacitance);
double josephson_energy(double junction_inductance);
/// Symmetric SQUID: E_J(Phi) = E_J,max |cos(pi Phi / Phi0)|.
double squid_josephson_energy(double ej_max, double flux_bias);

/// Energy scales for a parameter set, SQUID flux tuning included.
EnergyScales energy_scales(const TransmonParams& params);

/// f_q = (sqrt(8 E_c E_J) - E_c) / h.
double transmon_frequency(const EnergyScales& scales);
/// -E_c / h.
double anharmonicity(const EnergyScales& scales);
double ej_ec_ratio(const EnergyScales& scales);

/// Lowest n_levels eigenenergies (J, ascending) of the Cooper-pair-box Hamiltonian
/// 4 E_c (n - n_g)^2 |n><n| - E_J/2 (|n><n+1| + h.c.) for n in [-N, N].
/// Throws CutoffError when the highest requested level leaks onto the boundary
/// charge states (weight > 1e-8).
std::vector<double> cpb_spectrum(const EnergyScales& scales, double offset_charge, int charge_cutoff, int n_levels);

struct OracleTransitions {
    double f01;           // Hz
    double f12;           // Hz
    double anharmonicity; // (E12 - E01) / h
};

/// f01, f12 and anharmonicity from the charge-basis oracle.
OracleTransitions cpb_transitions(const EnergyScales& scales, double offset_charge = 0.0,
                                  int charge_cutoff = kDefaultChargeCutoff);

}  // namespace flipkit::transmon
