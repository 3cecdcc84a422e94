#pragma once

namespace flipkit::coupling {

/// Overlapping qubit pads across the interlayer, modelled as a parallel-plate capacitor.
struct CouplingGeometry {
    double pad_overlap_area = 0.0;  // m^2
    double separation = 0.0;        // d, m
    double interlayer_eps_r = 1.0;

    void validate() const;
};

struct CoupledPair {
    double f1 = 0.0;  // Hz
    double f2 = 0.0;  // Hz
    double g = 0.0;   // Hz (g / 2 pi)
};

struct HybridizedModes {
    double f_minus;  // Hz
    double f_plus;   // Hz
};

/// C_g = eps0 eps_r A / d.
double parallel_plate_cg(const CouplingGeometry& geometry);

/// r = (cg / 2) / (sqrt(cg + c1) sqrt(cg + c2)); always <= 1/2.
double capacitance_ratio(double cg, double c1, double c2);

/// Coupling capacitance giving a target ratio r in [0, 1/2) for fixed c1, c2 (closed-form inverse).
double cg_for_ratio(double r, double c1, double c2);

/// Pad overlap area reproducing ratio r at separation d.
double calibrate_overlap_area(double r, double separation, double interlayer_eps_r, double c1, double c2);

/// g / 2 pi = r sqrt(f1 f2). Frequencies in Hz in and out.
double coupling_strength(double r, double f1, double f2);

/// Normal modes of [[f1, g], [g, f2]].
HybridizedModes hybridized_modes(const CoupledPair& pair);

/// chi = g^2 alpha / (delta (delta + alpha)), all in Hz, delta = f_q - f_r.
/// Throws DomainError at the straddling singularities delta = 0 and delta = -alpha.
double dispersive_shift(double g_qr, double detuning, double anharmonicity);

}  // namespace flipkit::coupling
