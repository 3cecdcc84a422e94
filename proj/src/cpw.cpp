#include "flipkit/cpw.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/numerics.hpp"

namespace flipkit::cpw {

using constants::speed_of_light;

void CpwGeometry::validate() const {
    if (!(trace_width > 0.0) || !(trace_gap > 0.0)) {
        throw DomainError(fmt::format("CPW needs w > 0 and s > 0 (w={}, s={})", trace_width, trace_gap));
    }
    if (!(eps_substrate >= 1.0) || !(eps_superstrate >= 1.0)) {
        throw DomainError(fmt::format("relative permittivities must be >= 1 (substrate={}, superstrate={})",
                                      eps_substrate, eps_superstrate));
    }
    if (substrate_thickness < 0.0) throw DomainError("substrate thickness must be non-negative");
}

void ResonatorSpec::validate() const {
    if (!(physical_length > 0.0)) throw DomainError("resonator length must be positive");
    if (!(pocket_extension >= 0.0) || !(pocket_extension < physical_length)) {
        throw DomainError(fmt::format("pocket extension {} must lie in [0, length={})", pocket_extension,
                                      physical_length));
    }
    if (!(eps_eff >= 1.0)) throw DomainError("resonator eps_eff must be >= 1");
}

double effective_permittivity(double eps_substrate, double eps_superstrate) {
    if (!(eps_substrate >= 1.0) || !(eps_superstrate >= 1.0)) {
        throw DomainError("relative permittivities must be >= 1");
    }
    return 0.5 * (eps_substrate + eps_superstrate);
}

Modulus modulus_k0(double trace_width, double trace_gap) {
    if (!(trace_width > 0.0) || !(trace_gap > 0.0)) {
        throw DomainError(fmt::format("CPW needs w > 0 and s > 0 (w={}, s={})", trace_width, trace_gap));
    }
    const double k0 = trace_width / (trace_width + 2.0 * trace_gap);
    return {k0, std::sqrt((1.0 - k0) * (1.0 + k0))};
}

Modulus modulus_k0(const CpwGeometry& geometry) {
    geometry.validate();
    return modulus_k0(geometry.trace_width, geometry.trace_gap);
}

double characteristic_impedance(double trace_width, double trace_gap, double eps_eff) {
    if (!(eps_eff >= 1.0)) throw DomainError("eps_eff must be >= 1");
    const Modulus m = modulus_k0(trace_width, trace_gap);
    const double prefactor =
        std::sqrt(constants::vacuum_permeability / (16.0 * constants::vacuum_permittivity * eps_eff));
    return prefactor * numerics::elliptic_k(m.k0_prime) / numerics::elliptic_k(m.k0);
}

double characteristic_impedance(const CpwGeometry& geometry) {
    geometry.validate();
    return characteristic_impedance(geometry.trace_width, geometry.trace_gap,
                                    effective_permittivity(geometry.eps_substrate, geometry.eps_superstrate));
}

double solve_gap_for_impedance(double trace_width, double eps_eff, double z_target) {
    if (!(trace_width > 0.0)) throw DomainError("trace width must be positive");
    if (!(z_target > 0.0)) throw DomainError("target impedance must be positive");
    const numerics::RealInterval bracket(trace_width / 100.0, trace_width * 100.0);
    auto residual = [&](double gap) { return characteristic_impedance(trace_width, gap, eps_eff) - z_target; };
    const double gap = numerics::find_root(residual, bracket, 1e-13 * trace_width);
    if (std::abs(residual(gap)) > 1e-4) {
        throw BracketError(fmt::format("gap search stalled {} ohm from target", residual(gap)));
    }
    return gap;
}

double phase_velocity(double eps_eff) {
    if (!(eps_eff >= 1.0)) throw DomainError("eps_eff must be >= 1");
    return speed_of_light / std::sqrt(eps_eff);
}

double quarter_wave_frequency(const ResonatorSpec& resonator, bool use_extension) {
    resonator.validate();
    const double length =
        use_extension ? resonator.physical_length : resonator.physical_length - resonator.pocket_extension;
    return phase_velocity(resonator.eps_eff) / (4.0 * length);
}

FrequencyInterval quarter_wave_interval(const ResonatorSpec& resonator) {
    return {quarter_wave_frequency(resonator, true), quarter_wave_frequency(resonator, false)};
}

CpwGeometry paper_default_geometry() {
    return CpwGeometry{
        .trace_width = 10e-6,
        .trace_gap = 5.806e-6,
        .eps_substrate = 11.9,
        .eps_superstrate = 1.0,
        .substrate_thickness = 0.75e-3,
    };
}

}  // namespace flipkit::cpw
