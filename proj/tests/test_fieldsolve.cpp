#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "flipkit/cpw.hpp"
#include "flipkit/errors.hpp"
#include "flipkit/fieldsolve.hpp"

using namespace flipkit;
using namespace flipkit::fieldsolve;

namespace {

const double kEps0 = 8.8541878128e-12;

// Grounded floor, 1 V plate of width w at height gap, open sides and top.
CrossSection plates(double w, double gap, std::size_t nx, std::size_t ny, double eps = 1.0) {
    const double h = gap / static_cast<double>(ny);
    CrossSection cs;
    cs.x_lines = uniform_axis(0.0, w, nx);
    cs.y_lines = uniform_axis(0.0, gap + h, ny + 1);
    cs.regions = {{"fill", {0.0, 0.0, w, gap + h}, eps}};
    cs.conductors = {{"plate", {0.0, gap, w, gap + h}, 1.0}};
    cs.walls = {Wall::open, Wall::open, Wall::grounded, Wall::open};
    return cs;
}

}  // namespace

TEST(FieldSolve, ParallelPlateCapacitance) {
    const double w = 100e-6;
    const double gap = 10e-6;
    const double c = capacitance_per_length(plates(w, gap, 100, 10));
    EXPECT_NEAR(c / (kEps0 * w / gap), 1.0, 0.01);
}

TEST(FieldSolve, LinearRampBetweenPlates) {
    const auto cs = plates(10e-6, 10e-6, 4, 10);
    const auto sol = solve_potential(cs);
    for (std::size_t j = 0; j < 10; ++j) {
        const double expected = (j + 0.5) / 10.0;
        for (std::size_t i = 0; i < sol.nx; ++i) EXPECT_NEAR(sol.at(i, j), expected, 1e-6);
    }
}

TEST(FieldSolve, HomogeneousDielectricScales) {
    const double c1 = capacitance_per_length(plates(100e-6, 10e-6, 20, 10));
    const double c2 = capacitance_per_length(plates(100e-6, 10e-6, 20, 10, 6.45));
    EXPECT_NEAR(c2 / c1, 6.45, 6.45e-3);
}

TEST(FieldSolve, CapacitanceFallsWithSeparation) {
    double prev = INFINITY;
    for (double gap : {5e-6, 10e-6, 20e-6}) {
        const double c = capacitance_per_length(plates(100e-6, gap, 20, 10));
        EXPECT_LT(c, prev);
        prev = c;
    }
}

TEST(FieldSolve, UniformPotentialIsFieldFree) {
    auto cs = plates(10e-6, 10e-6, 6, 6);
    cs.walls = {Wall::open, Wall::open, Wall::open, Wall::open};
    const auto sol = solve_potential(cs);
    for (double v : sol.potential) EXPECT_NEAR(v, 1.0, 1e-7);
    EXPECT_NEAR(stored_energy(cs, sol), 0.0, 1e-20);
    EXPECT_THROW(capacitance_per_length(cs), DegenerateError);
}

TEST(FieldSolve, VacuumEpsEffIsExactlyOne) {
    const auto cs = cpw_cross_section(10e-6, 5.806e-6, 1.0, 1.0, {10.0, 1.0 / 10.0, 1.3, 1.0});
    const auto r = extract_eps_eff_and_z0(cs);
    EXPECT_EQ(r.eps_eff, 1.0);
}

TEST(FieldSolve, HomogeneousCpwEpsEff) {
    const auto cs = cpw_cross_section(10e-6, 5.806e-6, 6.45, 6.45, {10.0, 1.0 / 10.0, 1.3, 1.0});
    EXPECT_NEAR(extract_eps_eff_and_z0(cs).eps_eff, 6.45, 6.45e-3);
}

TEST(FieldSolve, MaximumPrinciple) {
    const auto cs = cpw_cross_section(10e-6, 5.806e-6, 11.9, 1.0, {10.0, 1.0 / 10.0, 1.3, 1.0});
    const auto sol = solve_potential(cs);
    for (double v : sol.potential) {
        EXPECT_GE(v, -1e-9);
        EXPECT_LE(v, 1.0 + 1e-9);
    }
}

TEST(FieldSolve, PaperDefaultCoarse) {
    const auto g = cpw::paper_default_geometry();
    CpwSectionOptions opt;
    opt.h_fine_fraction = 1.0 / 20.0;
    const auto cs = cpw_cross_section(g.trace_width, g.trace_gap, g.eps_substrate, g.eps_superstrate, opt);
    const auto r = extract_eps_eff_and_z0(cs);
    // w/20 under-resolves the gap-edge singularity; eps_eff comes out low.
    EXPECT_NEAR(r.eps_eff, 6.45, 0.08 * 6.45);
    EXPECT_LT(r.eps_eff, 6.45);
    EXPECT_NEAR(r.z0, cpw::characteristic_impedance(g), 0.03 * cpw::characteristic_impedance(g));

    const auto p = energy_participation(cs, solve_potential(cs));
    EXPECT_GT(p.at("substrate"), p.at("superstrate"));
    EXPECT_NEAR(p.at("substrate") + p.at("superstrate"), 1.0, 1e-9);
}

TEST(FieldSolve, RefinementConvergesMonotonically) {
    std::vector<double> z;
    for (double f : {1.0 / 5.0, 1.0 / 10.0, 1.0 / 20.0}) {
        CpwSectionOptions opt;
        opt.h_fine_fraction = f;
        z.push_back(extract_eps_eff_and_z0(cpw_cross_section(10e-6, 5.806e-6, 11.9, 1.0, opt)).eps_eff);
    }
    EXPECT_LT(std::abs(z[2] - z[1]), std::abs(z[1] - z[0]));
    EXPECT_GT(z[1], z[0]);
    EXPECT_GT(z[2], z[1]);
}

TEST(FieldSolve, SingleRegionParticipation) {
    const auto cs = plates(10e-6, 10e-6, 4, 4);
    const auto p = energy_participation(cs, solve_potential(cs));
    ASSERT_EQ(p.size(), 1u);
    EXPECT_DOUBLE_EQ(p.at("fill"), 1.0);
}

TEST(FieldSolve, MirrorSymmetricParticipation) {
    auto cs = plates(20e-6, 10e-6, 8, 10);
    cs.regions = {{"left", {0.0, 0.0, 10e-6, 11e-6}, 3.0}, {"right", {10e-6, 0.0, 20e-6, 11e-6}, 3.0}};
    const auto p = energy_participation(cs, solve_potential(cs));
    EXPECT_NEAR(p.at("left"), 0.5, 1e-6);
    EXPECT_NEAR(p.at("right"), 0.5, 1e-6);
}

TEST(FieldSolve, NonConvergenceCarriesResidual) {
    SolverOptions opt;
    opt.max_iterations = 3;
    try {
        solve_potential(plates(100e-6, 10e-6, 40, 40), opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_GT(e.residual(), opt.tolerance);
        EXPECT_EQ(e.iterations(), 3);
    }
}

TEST(FieldSolve, GeometryValidation) {
    auto cs = plates(10e-6, 10e-6, 4, 4);
    cs.conductors.push_back({"other", {0.0, 10e-6, 5e-6, 12e-6}, 1.0});
    EXPECT_THROW(validate(cs), ValidationError);

    auto hot = plates(10e-6, 10e-6, 4, 4);
    hot.walls[static_cast<int>(Side::top)] = Wall::grounded;
    EXPECT_THROW(validate(hot), ValidationError);

    auto gap = plates(10e-6, 10e-6, 4, 4);
    gap.regions[0].box.x1 = 5e-6;
    EXPECT_THROW(validate(gap), ValidationError);
}

TEST(FieldSolve, PotentialCsv) {
    const auto cs = plates(10e-6, 10e-6, 2, 2);
    const auto sol = solve_potential(cs);
    std::ostringstream out;
    write_potential_csv(out, cs, sol);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,y,V");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, static_cast<int>(sol.nx * sol.ny));
}
