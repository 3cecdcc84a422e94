#include "flipkit/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "flipkit/errors.hpp"

namespace flipkit::units {

namespace {

struct UnitEntry {
    std::string_view suffix;
    Dimension dimension;
    double scale;
};

constexpr std::array<UnitEntry, 24> kUnits{{
    {"nm", Dimension::length, 1e-9},
    {"um", Dimension::length, 1e-6},
    {"µm", Dimension::length, 1e-6},
    {"mm", Dimension::length, 1e-3},
    {"m", Dimension::length, 1.0},
    {"um2", Dimension::area, 1e-12},
    {"mm2", Dimension::area, 1e-6},
    {"m2", Dimension::area, 1.0},
    {"aF", Dimension::capacitance, 1e-18},
    {"fF", Dimension::capacitance, 1e-15},
    {"pF", Dimension::capacitance, 1e-12},
    {"nF", Dimension::capacitance, 1e-9},
    {"F", Dimension::capacitance, 1.0},
    {"pH", Dimension::inductance, 1e-12},
    {"nH", Dimension::inductance, 1e-9},
    {"uH", Dimension::inductance, 1e-6},
    {"H", Dimension::inductance, 1.0},
    {"Hz", Dimension::frequency, 1.0},
    {"kHz", Dimension::frequency, 1e3},
    {"MHz", Dimension::frequency, 1e6},
    {"GHz", Dimension::frequency, 1e9},
    {"ohm", Dimension::impedance, 1.0},
    {"Ohm", Dimension::impedance, 1.0},
    {"Ω", Dimension::impedance, 1.0},
}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(Dimension d) {
    switch (d) {
        case Dimension::dimensionless: return "dimensionless";
        case Dimension::length: return "length";
        case Dimension::area: return "area";
        case Dimension::capacitance: return "capacitance";
        case Dimension::inductance: return "inductance";
        case Dimension::frequency: return "frequency";
        case Dimension::impedance: return "impedance";
    }
    return "unknown";
}

double parse_quantity(std::string_view text, Dimension expected) {
    const std::string_view body = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || ptr == body.data()) {
        throw DomainError(fmt::format("'{}' is not a number", body));
    }
    if (!std::isfinite(value)) throw DomainError(fmt::format("'{}' is not finite", body));

    const std::string_view suffix = trim(body.substr(static_cast<std::size_t>(ptr - body.data())));
    if (suffix.empty()) return value;
    for (const auto& unit : kUnits) {
        if (unit.suffix != suffix) continue;
        if (unit.dimension != expected) {
            throw DomainError(fmt::format("unit '{}' is a {}, expected {}", suffix, to_string(unit.dimension),
                                          to_string(expected)));
        }
        return value * unit.scale;
    }
    throw DomainError(fmt::format("unknown unit '{}' in '{}'", suffix, body));
}

}  // namespace flipkit::units
