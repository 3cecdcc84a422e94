#include "flipkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "flipkit/errors.hpp"

namespace flipkit {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Axis {
    double lo;
    double hi;
    bool log;

    double map(double v) const {
        const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
        return t;
    }
};

Axis make_axis(const std::vector<double>& values, bool log, const std::string& name) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        if (log && !(v > 0.0)) continue;
        const double t = log ? std::log10(v) : v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (!std::isfinite(lo)) throw ValidationError(fmt::format("column '{}' has no plottable values", name));
    if (hi == lo) {
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

std::string num(double v) { return fmt::format("{:.6g}", v); }

std::string px(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

void emit_plot(std::ostream& out, const Table& table, const std::string& x_column,
               const std::vector<std::string>& y_columns, const PlotOptions& options) {
    if (table.rows.size() < 2) throw ValidationError("plot needs at least two rows");
    if (y_columns.empty()) throw ValidationError("plot needs at least one y column");
    const auto column = [&](const std::string& name) {
        try {
            return table.column(name);
        } catch (const DomainError& e) {
            throw ValidationError(e.what());
        }
    };
    const std::vector<double> xs = column(x_column);
    std::vector<std::vector<double>> ys;
    std::vector<double> all_y;
    for (const auto& c : y_columns) {
        ys.push_back(column(c));
        all_y.insert(all_y.end(), ys.back().begin(), ys.back().end());
    }
    const Axis ax = make_axis(xs, options.log_x, x_column);
    const Axis ay = make_axis(all_y, options.log_y, y_columns.front());

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double v) { return kLeft + ax.map(v) * pw; };
    auto sy = [&](double v) { return kTop + (1.0 - ay.map(v)) * ph; };
    auto usable = [](double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
    out << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";
    out << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", px(kLeft),
                       px(kTop), px(pw), px(ph));
    if (!options.title.empty()) {
        out << fmt::format("<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n", options.title);
    }

    for (int k = 0; k <= 4; ++k) {
        const double t = k / 4.0;
        const double xv = ax.lo + t * (ax.hi - ax.lo);
        const double yv = ay.lo + t * (ay.hi - ay.lo);
        const double gx = kLeft + t * pw;
        const double gy = kTop + (1.0 - t) * ph;
        out << fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n", px(gx), px(kTop),
                           px(kTop + ph));
        out << fmt::format("<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#dddddd\"/>\n", px(gy), px(kLeft),
                           px(kLeft + pw));
        out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n", px(gx),
                           px(kTop + ph + 16), num(ax.log ? std::pow(10.0, xv) : xv));
        out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n", px(kLeft - 6),
                           px(gy + 4), num(ay.log ? std::pow(10.0, yv) : yv));
    }
    out << fmt::format("<text x=\"400\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}{}</text>\n",
                       px(kHeight - 15), x_column, options.log_x ? " (log)" : "");

    for (std::size_t s = 0; s < ys.size(); ++s) {
        const char* colour = kColours[s % std::size(kColours)];
        std::string points;
        std::size_t first = xs.size();
        std::size_t last = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!usable(xs[i], ax.log) || !usable(ys[s][i], ay.log)) continue;
            if (!points.empty()) points += ' ';
            points += px(sx(xs[i])) + "," + px(sy(ys[s][i]));
            first = std::min(first, i);
            last = i;
        }
        if (first >= last) throw ValidationError(fmt::format("column '{}' has fewer than two plottable points", y_columns[s]));
        out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", colour, points);
        for (std::size_t i : {first, last}) {
            out << fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n", px(sx(xs[i])), px(sy(ys[s][i])),
                               colour);
            out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"{}\">({}, {})</text>\n",
                               px(sx(xs[i]) + (i == first ? 5.0 : -5.0)), px(sy(ys[s][i]) - 6),
                               i == first ? "start" : "end", num(xs[i]), num(ys[s][i]));
        }
        out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", px(kLeft + 10),
                           px(kTop + 16 + 14 * static_cast<double>(s)), colour, y_columns[s]);
    }
    out << "</svg>\n";
}

void emit_plot(const std::string& path, const Table& table, const std::string& x_column,
               const std::vector<std::string>& y_columns, const PlotOptions& options) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ValidationError(fmt::format("cannot write '{}'", path));
    emit_plot(file, table, x_column, y_columns, options);
}

}  // namespace flipkit
