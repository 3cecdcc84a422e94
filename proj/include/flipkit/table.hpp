#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace flipkit {

/// Fixed 12-significant-digit decimal text used by every emitted file.
std::string format_number(double value);

/// `value` rounded to 12 significant digits (the value format_number prints).
double round_to_12_digits(double value);

/// Column-major-by-name numeric table, rows in insertion order.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column_index(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
    void write_csv(std::ostream& out) const;
};

}  // namespace flipkit
