#pragma once

// Closed-form coplanar waveguide design from conformal mapping.
//
// The impedance formula is the infinite-substrate result: substrate
// thickness is carried in CpwGeometry for bookkeeping but does not enter
// Z0. Finite-H calculators land a few tenths of an ohm away.

namespace flipkit::cpw {

struct CpwGeometry {
    double trace_width = 0.0;        // w, m
    double trace_gap = 0.0;          // s, m
    double eps_substrate = 1.0;      // below the metal
    double eps_superstrate = 1.0;    // above the metal (interlayer)
    double substrate_thickness = 0.0;  // H, m (informational)

    void validate() const;
};

struct ResonatorSpec {
    double physical_length = 0.0;   // m
    double pocket_extension = 0.0;  // m, part of the line inside the transmon pocket
    double eps_eff = 1.0;

    void validate() const;
};

struct Modulus {
    double k0;
    double k0_prime;
};

/// Quarter-wave resonance bounds: lower uses the full length, upper the length minus the pocket extension.
struct FrequencyInterval {
    double lower;
    double upper;
};

/// Mean of the two half-space permittivities.
double effective_permittivity(double eps_substrate, double eps_superstrate);

Modulus modulus_k0(double trace_width, double trace_gap);
Modulus modulus_k0(const CpwGeometry& geometry);

/// Z0 from explicit w, s and effective permittivity.
double characteristic_impedance(double trace_width, double trace_gap, double eps_eff);
/// Z0 with eps_eff taken from the geometry's two permittivities.
double characteristic_impedance(const CpwGeometry& geometry);

/// Gap s giving Z0 = z_target for fixed w, by bisection on s in [w/100, 100 w].
/// Result satisfies |Z0(s) - z_target| <= 1e-4 ohm.
double solve_gap_for_impedance(double trace_width, double eps_eff, double z_target);

double phase_velocity(double eps_eff);

double quarter_wave_frequency(const ResonatorSpec& resonator, bool use_extension);
FrequencyInterval quarter_wave_interval(const ResonatorSpec& resonator);

/// Default geometry constants shipped as the "paper-default" preset.
CpwGeometry paper_default_geometry();

}  // namespace flipkit::cpw
