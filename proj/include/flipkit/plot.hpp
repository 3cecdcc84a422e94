#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "flipkit/table.hpp"

namespace flipkit {

struct PlotOptions {
    bool log_x = false;
    bool log_y = false;
    std::string title;
};

/// 800x500 SVG line chart of `y_columns` against `x_column`; first and last points labelled.
/// Throws ValidationError for fewer than two rows, an unknown column, or nonpositive data on a log axis.
void emit_plot(std::ostream& out, const Table& table, const std::string& x_column,
               const std::vector<std::string>& y_columns, const PlotOptions& options = {});

void emit_plot(const std::string& path, const Table& table, const std::string& x_column,
               const std::vector<std::string>& y_columns, const PlotOptions& options = {});

}  // namespace flipkit
