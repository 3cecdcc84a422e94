#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "flipkit/errors.hpp"
#include "flipkit/loss.hpp"

using namespace flipkit;
using namespace flipkit::loss;

namespace {

const double kPi = std::acos(-1.0);

LossBudget budget(double p = 0.1, double tan_delta = 0.0) {
    LossBudget b;
    b.mode_frequency = 5.16416e9;
    b.baseline_q = 1.43512e6;
    b.regions = {{"substrate", 0.85, 0.0}, {"interlayer", p, tan_delta}};
    return b;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int k = 0; k < n; ++k) g.push_back(lo * std::pow(hi / lo, k / double(n - 1)));
    return g;
}

}  // namespace

TEST(T1Bound, TableModes) {
    EXPECT_NEAR(t1_upper_bound(1.43512e6, 5.16416e9), 44.23e-6, 0.05e-6);
    EXPECT_NEAR(t1_upper_bound(754259, 5.74989e9), 20.88e-6, 0.05e-6);
    EXPECT_NEAR(t1_upper_bound(754259, 5.74989e9), 754259 / (2 * kPi * 5.74989e9), 1e-18);
    EXPECT_DOUBLE_EQ(t1_upper_bound(2e6, 5e9), 2 * t1_upper_bound(1e6, 5e9));
    EXPECT_THROW(t1_upper_bound(0.0, 5e9), DomainError);
}

TEST(DecayRate, Examples) {
    auto b = budget();
    EXPECT_EQ(dielectric_decay_rate(b), 0.0);

    LossBudget single;
    single.mode_frequency = 5e9;
    single.baseline_q = 1e6;
    single.regions = {{"all", 1.0, 1e-6}};
    EXPECT_NEAR(dielectric_decay_rate(single), 3.1416e4, 1.0);

    auto both = budget(0.1, 2e-5);
    both.regions[0].loss_tangent = 1e-6;
    auto only0 = both;
    only0.regions[1].loss_tangent = 0.0;
    auto only1 = both;
    only1.regions[0].loss_tangent = 0.0;
    EXPECT_NEAR(dielectric_decay_rate(both), dielectric_decay_rate(only0) + dielectric_decay_rate(only1), 1e-9);
}

TEST(DecayRate, LinearInParticipationAndTangent) {
    const double g1 = dielectric_decay_rate(budget(0.05, 1e-4));
    EXPECT_NEAR(dielectric_decay_rate(budget(0.10, 1e-4)), 2 * g1, 1e-9 * g1);
    EXPECT_NEAR(dielectric_decay_rate(budget(0.05, 3e-4)), 3 * g1, 1e-9 * g1);
}

TEST(QWithDielectric, Composition) {
    auto b = budget();
    EXPECT_EQ(q_with_dielectric(b), b.baseline_q);
    b = budget(0.1, 1e-3);
    EXPECT_NEAR(q_with_dielectric(b), 1.0 / (0.1 * 1e-3), 0.01 / (0.1 * 1e-3));
    EXPECT_LT(q_with_dielectric(b), b.baseline_q);
}

TEST(QWithDielectric, LogLogSlope) {
    const auto rows = t1_vs_loss_tangent(budget(0.1), "interlayer", log_grid(1e-4, 1e-2, 21));
    const double slope = (std::log(rows.back().q_total) - std::log(rows.front().q_total)) /
                         (std::log(rows.back().tan_delta) - std::log(rows.front().tan_delta));
    EXPECT_NEAR(slope, -1.0, 0.05);
}

TEST(T1VsLossTangent, Properties) {
    std::vector<double> grid{0.0};
    for (double t : log_grid(1e-7, 1e-2, 30)) grid.push_back(t);
    const auto rows = t1_vs_loss_tangent(budget(0.1), "interlayer", grid);
    EXPECT_DOUBLE_EQ(rows.front().t1_upper_s, t1_upper_bound(1.43512e6, 5.16416e9));
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_LE(rows[k].t1_upper_s, rows[k - 1].t1_upper_s);
        EXPECT_LE(rows[k].q_total, rows[k - 1].q_total);
    }
    const auto half = t1_vs_loss_tangent(budget(0.05), "interlayer", {1e-2});
    const auto full = t1_vs_loss_tangent(budget(0.1), "interlayer", {1e-2});
    EXPECT_NEAR(half[0].t1_upper_s / full[0].t1_upper_s, 2.0, 0.04);

    EXPECT_THROW(t1_vs_loss_tangent(budget(), "interlayer", {1e-3, 1e-4}), DomainError);
    EXPECT_THROW(t1_vs_loss_tangent(budget(), "nowhere", {1e-3}), DomainError);
}

TEST(Linearity, ConstantParticipationIsExact) {
    std::vector<double> grid{0.0};
    for (double t : log_grid(1e-6, 1e-2, 25)) grid.push_back(t);
    EXPECT_EQ(gamma_linearity_check(budget(0.1), "interlayer", grid), 0.0);
}

TEST(Linearity, RisingParticipationDeviates) {
    const auto grid = log_grid(1e-4, 1e-1, 10);
    const double dev = gamma_linearity_check(budget(0.1), "interlayer", grid,
                                             [](double t) { return 0.05 + 0.5 * t; });
    EXPECT_GT(dev, 1e-3);
}

TEST(Linearity, Errors) {
    EXPECT_THROW(gamma_linearity_check(budget(), "interlayer", {}), DomainError);
    EXPECT_THROW(gamma_linearity_check(budget(), "interlayer", {0.0}), DomainError);
    EXPECT_THROW(gamma_linearity_check(budget(), "interlayer", {0.01, 0.2}), DomainError);
}

TEST(LossBudget, Validation) {
    auto b = budget();
    b.regions[0].participation = 0.95;
    EXPECT_THROW(b.validate(), DomainError);
    b = budget();
    b.regions[1].loss_tangent = -1e-6;
    EXPECT_THROW(b.validate(), DomainError);
    b = budget();
    b.baseline_q = 0.0;
    EXPECT_THROW(b.validate(), DomainError);
}

TEST(LossCsv, Header) {
    std::ostringstream out;
    write_loss_csv(out, t1_vs_loss_tangent(budget(0.1), "interlayer", {0.0, 1e-3}));
    const std::string s = out.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "tan_delta,q_total,t1_upper_s,gamma_cap_per_s");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
