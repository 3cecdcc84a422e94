#include "flipkit/table.hpp"

#include <algorithm>
#include <cstdlib>

#include <fmt/format.h>

#include "flipkit/errors.hpp"

namespace flipkit {

std::string format_number(double value) { return fmt::format("{:.12g}", value); }

double round_to_12_digits(double value) { return std::strtod(format_number(value).c_str(), nullptr); }

std::size_t Table::column_index(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError(fmt::format("table has no column '{}'", name));
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::column(std::string_view name) const {
    const std::size_t idx = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(idx));
    return out;
}

void Table::write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
        out << '\n';
    }
}

}  // namespace flipkit
