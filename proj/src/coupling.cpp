#include "flipkit/coupling.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/numerics.hpp"

namespace flipkit::coupling {

void CouplingGeometry::validate() const {
    if (!(pad_overlap_area > 0.0) || !(separation > 0.0) || !(interlayer_eps_r > 0.0)) {
        throw DomainError(fmt::format("coupling geometry needs positive area, separation and eps_r (A={}, d={}, eps_r={})",
                                      pad_overlap_area, separation, interlayer_eps_r));
    }
}

double parallel_plate_cg(const CouplingGeometry& geometry) {
    geometry.validate();
    return constants::vacuum_permittivity * geometry.interlayer_eps_r * geometry.pad_overlap_area /
           geometry.separation;
}

double capacitance_ratio(double cg, double c1, double c2) {
    if (!(cg >= 0.0) || !(c1 >= 0.0) || !(c2 >= 0.0) || !(cg + c1 > 0.0) || !(cg + c2 > 0.0)) {
        throw DomainError("capacitance ratio needs non-negative capacitances with cg + c > 0");
    }
    return 0.5 * cg / (std::sqrt(cg + c1) * std::sqrt(cg + c2));
}

double cg_for_ratio(double r, double c1, double c2) {
    if (!(r >= 0.0) || !(r < 0.5)) throw DomainError(fmt::format("capacitance ratio {} outside [0, 1/2)", r));
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("qubit capacitances must be positive");
    // 4 r^2 (cg + c1)(cg + c2) = cg^2, positive root.
    const double r2 = 4.0 * r * r;
    const double a = 1.0 - r2;
    const double b = -r2 * (c1 + c2);
    const double c = -r2 * c1 * c2;
    return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

double calibrate_overlap_area(double r, double separation, double interlayer_eps_r, double c1, double c2) {
    if (!(separation > 0.0) || !(interlayer_eps_r > 0.0)) throw DomainError("separation and eps_r must be positive");
    return cg_for_ratio(r, c1, c2) * separation / (constants::vacuum_permittivity * interlayer_eps_r);
}

double coupling_strength(double r, double f1, double f2) {
    if (!(r >= 0.0)) throw DomainError("capacitance ratio must be non-negative");
    if (!(f1 >= 0.0) || !(f2 >= 0.0)) throw DomainError("frequencies must be non-negative");
    // g = r sqrt(w1 w2) in angular units; dividing by 2 pi leaves the same form in Hz.
    const double omega1 = 2.0 * constants::pi * f1;
    const double omega2 = 2.0 * constants::pi * f2;
    return r * std::sqrt(omega1 * omega2) / (2.0 * constants::pi);
}

HybridizedModes hybridized_modes(const CoupledPair& pair) {
    numerics::SymmetricMatrix m(2);
    m.at(0, 0) = pair.f1;
    m.at(1, 1) = pair.f2;
    m.at(0, 1) = pair.g;
    const auto eig = numerics::eig_sym(m);
    return {eig.values[0], eig.values[1]};
}

double dispersive_shift(double g_qr, double detuning, double anharmonicity) {
    if (detuning == 0.0 || detuning + anharmonicity == 0.0) {
        throw DomainError(fmt::format("dispersive approximation breaks down at detuning {} with anharmonicity {}",
                                      detuning, anharmonicity));
    }
    return g_qr * g_qr * anharmonicity / (detuning * (detuning + anharmonicity));
}

}  // namespace flipkit::coupling
