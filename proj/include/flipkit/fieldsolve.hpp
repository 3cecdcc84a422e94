#pragma once

// Quasi-static 2D Laplace solver for layered cross-sections.
//
// Discretization: cell-centred finite volumes on a tensor grid. Each cell
// carries one relative permittivity; the coupling across a face is the
// series (harmonic) combination of the two half-cells. Conductor cells are
// held at their potential and terminate the field at their faces. Energy
// is accumulated per half-cell, so it splits exactly between regions and
// 2U/V^2 equals the discrete charge-based capacitance.

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace flipkit::fieldsolve {

struct Rect {
    double x0, y0, x1, y1;

    bool contains(double x, double y) const noexcept { return x > x0 && x < x1 && y > y0 && y < y1; }
};

struct DielectricRegion {
    std::string name;
    Rect box;
    double eps_r = 1.0;
};

struct Conductor {
    std::string name;
    Rect box;
    double potential = 0.0;  // V
};

enum class Wall {
    grounded,  // 0 V on the wall
    open,      // zero normal flux (mirror / periodic-free truncation)
};

enum class Side : int { left = 0, right = 1, bottom = 2, top = 3 };

struct CrossSection {
    std::vector<double> x_lines;  // cell edges, strictly ascending, >= 2 entries
    std::vector<double> y_lines;
    std::vector<DielectricRegion> regions;
    std::vector<Conductor> conductors;
    std::array<Wall, 4> walls{Wall::grounded, Wall::grounded, Wall::grounded, Wall::grounded};

    std::size_t nx() const noexcept { return x_lines.empty() ? 0 : x_lines.size() - 1; }
    std::size_t ny() const noexcept { return y_lines.empty() ? 0 : y_lines.size() - 1; }

    // Same geometry with every region's permittivity set to 1.
    CrossSection vacuum_copy() const;
};

struct SolverOptions {
    double tolerance = 1e-8;  // max node update, V
    long max_iterations = 200'000;
    double relaxation = 1.9;
};

struct FieldSolution {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> potential;  // cell-centred, index i + nx * j
    bool converged = false;
    long iterations = 0;
    double residual = 0.0;  // last max update
    double relaxation_used = 0.0;

    double at(std::size_t i, std::size_t j) const { return potential[i + nx * j]; }
};

struct EpsEffZ0 {
    double capacitance;          // F/m with actual dielectrics
    double capacitance_vacuum;   // F/m, all regions vacuum
    double eps_eff;
    double z0;                   // ohm
};

/// Uniform axis of n cells on [lo, hi].
std::vector<double> uniform_axis(double lo, double hi, std::size_t cells);

/// Graded axis through every break point (all breaks become grid lines).
/// Cells start at h_fine next to each break and grow geometrically by
/// `growth` up to h_max toward interval midpoints.
std::vector<double> graded_axis(const std::vector<double>& breaks, double h_fine, double growth, double h_max);

/// Throws ValidationError unless the section is well formed: ascending grid lines,
/// every cell in exactly one dielectric region, non-overlapping conductors,
/// no adjacent cells of different conductors at different potentials.
void validate(const CrossSection& cs);

/// SOR on the discrete Laplace equation until the max update falls below tol.
/// Throws ConvergenceError (carrying the residual) if max_iterations is exceeded.
FieldSolution solve_potential(const CrossSection& cs, const SolverOptions& options = {});

/// Stored electric energy per unit length (J/m) of a solution.
double stored_energy(const CrossSection& cs, const FieldSolution& solution);

/// C = 2U / V^2 where V is the spread of fixed potentials (conductors and grounded walls).
double capacitance_per_length(const CrossSection& cs, const SolverOptions& options = {});

/// Runs the solver with the actual dielectrics and again in vacuum.
EpsEffZ0 extract_eps_eff_and_z0(const CrossSection& cs, const SolverOptions& options = {});

/// Fraction of stored electric energy in each named region; fractions sum to 1.
std::map<std::string, double> energy_participation(const CrossSection& cs, const FieldSolution& solution);

/// Writes "x,y,V" rows at cell centres.
void write_potential_csv(std::ostream& out, const CrossSection& cs, const FieldSolution& solution);

struct CpwSectionOptions {
    double margin_factor = 10.0;  // box half-width and half-height in units of the (w + 2s) aperture
    double h_fine_fraction = 1.0 / 40.0;  // finest cell as a fraction of w
    double growth = 1.25;
    double metal_thickness_cells = 1.0;  // metal thickness in fine cells
};

/// CPW section: substrate below y = 0, superstrate above, signal at 1 V,
/// ground planes to the grounded box walls at 0 V. Regions are named
/// "substrate" and "superstrate" (the slots between the metal are superstrate).
CrossSection cpw_cross_section(double trace_width, double trace_gap, double eps_substrate, double eps_superstrate,
                               const CpwSectionOptions& options = {});

}  // namespace flipkit::fieldsolve
