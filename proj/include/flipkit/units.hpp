#pragma once

#include <string>
#include <string_view>

namespace flipkit::units {

enum class Dimension { dimensionless, length, area, capacitance, inductance, frequency, impedance };

std::string_view to_string(Dimension d);

/// Parses "<number>[ ]<unit>" into SI, e.g. "5.806um", "8 fF", "0.5 mm", "7.11524 GHz".
/// Accepted suffixes: nm um µm mm m | um2 mm2 m2 | aF fF pF nF F | pH nH uH H | Hz kHz MHz GHz | ohm Ω.
/// A bare number is accepted for every dimension and taken as SI.
/// Throws DomainError on malformed text or a unit of the wrong dimension.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace flipkit::units
