#include <cmath>
#include <gtest/gtest.h>

#include <sstream>

#include "flipkit/errors.hpp"
#include "flipkit/plot.hpp"

using namespace flipkit;

namespace {

std::string render(const Table& t, const std::vector<std::string>& ys, PlotOptions o = {}) {
    std::ostringstream out;
    emit_plot(out, t, "x", ys, o);
    return out.str();
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto at = s.find(what); at != std::string::npos; at = s.find(what, at + 1)) ++n;
    return n;
}

}  // namespace

TEST(Plot, SingleRowIsAnError) {
    const Table t{{"x", "y"}, {{1.0, 2.0}}};
    EXPECT_THROW(render(t, {"y"}), ValidationError);
    EXPECT_THROW(render(Table{{"x", "y"}, {}}, {"y"}), ValidationError);
}

TEST(Plot, UnknownColumn) {
    const Table t{{"x", "y"}, {{1.0, 2.0}, {2.0, 3.0}}};
    EXPECT_THROW(render(t, {"z"}), ValidationError);
}

TEST(Plot, TwoPointsLabelBothEnds) {
    const Table t{{"x", "y"}, {{1.0, 2.0}, {3.0, 5.0}}};
    const auto svg = render(t, {"y"});
    EXPECT_NE(svg.find("width=\"800\" height=\"500\""), std::string::npos);
    EXPECT_EQ(count(svg, "<polyline"), 1u);
    EXPECT_EQ(count(svg, "<circle"), 2u);
    EXPECT_NE(svg.find("(1, 2)"), std::string::npos);
    EXPECT_NE(svg.find("(3, 5)"), std::string::npos);
}

TEST(Plot, Deterministic) {
    const Table t{{"x", "a", "b"}, {{1e-4, 10.0, 3.0}, {1e-3, 1.0, 4.0}, {1e-2, 0.1, 5.0}}};
    EXPECT_EQ(render(t, {"a", "b"}, {true, true, "t"}), render(t, {"a", "b"}, {true, true, "t"}));
}

TEST(Plot, LogLogPowerLawIsStraight) {
    Table t{{"x", "y"}, {}};
    for (int k = 0; k < 5; ++k) {
        const double x = std::pow(10.0, -4 + 0.5 * k);
        t.rows.push_back({x, 1.0 / x});
    }
    const auto svg = render(t, {"y"}, {true, true, ""});
    const auto at = svg.find("points=\"") + 8;
    std::istringstream pts(svg.substr(at, svg.find('"', at) - at));
    std::vector<std::pair<double, double>> xy;
    std::string tok;
    while (pts >> tok) {
        const auto comma = tok.find(',');
        xy.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    ASSERT_EQ(xy.size(), 5u);
    const double slope = (xy.back().second - xy.front().second) / (xy.back().first - xy.front().first);
    for (std::size_t k = 1; k + 1 < xy.size(); ++k) {
        EXPECT_NEAR(xy[k].second, xy.front().second + slope * (xy[k].first - xy.front().first), 0.02);
    }
}

TEST(Plot, LogAxisNeedsPositiveData) {
    const Table t{{"x", "y"}, {{0.0, 1.0}, {-1.0, 2.0}}};
    EXPECT_THROW(render(t, {"y"}, {true, false, ""}), ValidationError);
}
