#include "flipkit/fieldsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"

namespace flipkit::fieldsolve {

namespace {

constexpr double kInfinite = std::numeric_limits<double>::infinity();

// Per-cell material/conductor assignment and face couplings, all in units of eps0.
struct Discretization {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> eps;                    // per cell
    std::vector<int> region;                    // per cell, index into cs.regions
    std::vector<std::optional<double>> fixed;   // per cell, conductor potential
    std::vector<double> half_x;                 // per cell, eps * dy / (dx / 2)
    std::vector<double> half_y;                 // per cell, eps * dx / (dy / 2)
    std::vector<double> face_x;                 // (nx + 1) * ny, face i sits left of cell i
    std::vector<double> face_y;                 // nx * (ny + 1), face j sits below cell j

    std::size_t cell(std::size_t i, std::size_t j) const { return i + nx * j; }
    std::size_t fx(std::size_t i, std::size_t j) const { return i + (nx + 1) * j; }
    std::size_t fy(std::size_t i, std::size_t j) const { return i + nx * j; }
};

double series(double a, double b) {
    if (std::isinf(a) && std::isinf(b)) return 0.0;  // both sides fixed, no unknown couples through it
    if (std::isinf(a)) return b;
    if (std::isinf(b)) return a;
    return a * b / (a + b);
}

void check_axis(const std::vector<double>& lines, const char* name) {
    if (lines.size() < 2) throw ValidationError(fmt::format("{} needs at least two grid lines", name));
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (!std::isfinite(lines[k])) throw ValidationError(fmt::format("{}[{}] is not finite", name, k));
        if (k > 0 && !(lines[k] > lines[k - 1])) {
            throw ValidationError(fmt::format("{} must be strictly ascending at index {}", name, k));
        }
    }
}

Discretization discretize(const CrossSection& cs) {
    check_axis(cs.x_lines, "x_lines");
    check_axis(cs.y_lines, "y_lines");
    if (cs.regions.empty()) throw ValidationError("cross-section has no dielectric regions");
    for (const auto& r : cs.regions) {
        if (!(r.eps_r >= 1.0)) throw ValidationError(fmt::format("region '{}' has eps_r < 1", r.name));
    }

    Discretization d;
    d.nx = cs.nx();
    d.ny = cs.ny();
    const std::size_t cells = d.nx * d.ny;
    d.eps.assign(cells, 0.0);
    d.region.assign(cells, -1);
    d.fixed.assign(cells, std::nullopt);
    d.half_x.assign(cells, 0.0);
    d.half_y.assign(cells, 0.0);

    for (std::size_t j = 0; j < d.ny; ++j) {
        const double yc = 0.5 * (cs.y_lines[j] + cs.y_lines[j + 1]);
        const double dy = cs.y_lines[j + 1] - cs.y_lines[j];
        for (std::size_t i = 0; i < d.nx; ++i) {
            const double xc = 0.5 * (cs.x_lines[i] + cs.x_lines[i + 1]);
            const double dx = cs.x_lines[i + 1] - cs.x_lines[i];
            const std::size_t c = d.cell(i, j);
            int hits = 0;
            for (std::size_t r = 0; r < cs.regions.size(); ++r) {
                if (cs.regions[r].box.contains(xc, yc)) {
                    ++hits;
                    d.region[c] = static_cast<int>(r);
                }
            }
            if (hits != 1) {
                throw ValidationError(fmt::format("cell ({}, {}) at ({:g}, {:g}) lies in {} dielectric regions, expected 1",
                                                  i, j, xc, yc, hits));
            }
            d.eps[c] = cs.regions[static_cast<std::size_t>(d.region[c])].eps_r;
            int owners = 0;
            for (const auto& cond : cs.conductors) {
                if (cond.box.contains(xc, yc)) {
                    ++owners;
                    d.fixed[c] = cond.potential;
                }
            }
            if (owners > 1) {
                throw ValidationError(fmt::format("conductors overlap at cell ({}, {})", i, j));
            }
            if (d.fixed[c]) {
                d.half_x[c] = kInfinite;
                d.half_y[c] = kInfinite;
            } else {
                d.half_x[c] = d.eps[c] * dy / (0.5 * dx);
                d.half_y[c] = d.eps[c] * dx / (0.5 * dy);
            }
        }
    }

    auto wall_half = [&](Side side, std::size_t c) -> std::optional<double> {
        const Wall w = cs.walls[static_cast<int>(side)];
        if (w == Wall::open) return std::nullopt;
        if (d.fixed[c] && *d.fixed[c] != 0.0) {
            throw ValidationError("a conductor with non-zero potential touches a grounded wall");
        }
        return kInfinite;
    };

    d.face_x.assign((d.nx + 1) * d.ny, 0.0);
    d.face_y.assign(d.nx * (d.ny + 1), 0.0);
    for (std::size_t j = 0; j < d.ny; ++j) {
        for (std::size_t i = 0; i <= d.nx; ++i) {
            double g = 0.0;
            if (i == 0) {
                const auto c = d.cell(0, j);
                if (wall_half(Side::left, c)) g = series(kInfinite, d.half_x[c]);
            } else if (i == d.nx) {
                const auto c = d.cell(d.nx - 1, j);
                if (wall_half(Side::right, c)) g = series(d.half_x[c], kInfinite);
            } else {
                const auto a = d.cell(i - 1, j);
                const auto b = d.cell(i, j);
                if (d.fixed[a] && d.fixed[b] && *d.fixed[a] != *d.fixed[b]) {
                    throw ValidationError(fmt::format("conductors at different potentials touch at x-face ({}, {})", i, j));
                }
                g = series(d.half_x[a], d.half_x[b]);
            }
            d.face_x[d.fx(i, j)] = g;
        }
    }
    for (std::size_t j = 0; j <= d.ny; ++j) {
        for (std::size_t i = 0; i < d.nx; ++i) {
            double g = 0.0;
            if (j == 0) {
                const auto c = d.cell(i, 0);
                if (wall_half(Side::bottom, c)) g = series(kInfinite, d.half_y[c]);
            } else if (j == d.ny) {
                const auto c = d.cell(i, d.ny - 1);
                if (wall_half(Side::top, c)) g = series(d.half_y[c], kInfinite);
            } else {
                const auto a = d.cell(i, j - 1);
                const auto b = d.cell(i, j);
                if (d.fixed[a] && d.fixed[b] && *d.fixed[a] != *d.fixed[b]) {
                    throw ValidationError(fmt::format("conductors at different potentials touch at y-face ({}, {})", i, j));
                }
                g = series(d.half_y[a], d.half_y[b]);
            }
            d.face_y[d.fy(i, j)] = g;
        }
    }
    return d;
}

// Spread between the highest and lowest imposed potential.
double potential_spread(const CrossSection& cs) {
    double lo = kInfinite;
    double hi = -kInfinite;
    for (const auto& c : cs.conductors) {
        lo = std::min(lo, c.potential);
        hi = std::max(hi, c.potential);
    }
    for (Wall w : cs.walls) {
        if (w == Wall::grounded) {
            lo = std::min(lo, 0.0);
            hi = std::max(hi, 0.0);
        }
    }
    return hi > lo ? hi - lo : 0.0;
}

struct SweepResult {
    bool converged;
    bool diverged;
    long iterations;
    double residual;
};

SweepResult relax(const Discretization& d, std::vector<double>& phi, double omega, const SolverOptions& options) {
    const std::size_t nx = d.nx;
    const std::size_t ny = d.ny;
    double max_update = 0.0;
    for (long it = 1; it <= options.max_iterations; ++it) {
        max_update = 0.0;
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t c = d.cell(i, j);
                if (d.fixed[c]) continue;
                const double gw = d.face_x[d.fx(i, j)];
                const double ge = d.face_x[d.fx(i + 1, j)];
                const double gs = d.face_y[d.fy(i, j)];
                const double gn = d.face_y[d.fy(i, j + 1)];
                double num = 0.0;
                if (i > 0) num += gw * phi[c - 1];
                if (i + 1 < nx) num += ge * phi[c + 1];
                if (j > 0) num += gs * phi[c - nx];
                if (j + 1 < ny) num += gn * phi[c + nx];
                const double den = gw + ge + gs + gn;
                if (den == 0.0) continue;
                const double update = omega * (num / den - phi[c]);
                phi[c] += update;
                max_update = std::max(max_update, std::abs(update));
            }
        }
        if (!std::isfinite(max_update) || max_update > 1e6) return {false, true, it, max_update};
        if (max_update <= options.tolerance) return {true, false, it, max_update};
    }
    return {false, false, options.max_iterations, max_update};
}

std::vector<double> initial_potential(const Discretization& d) {
    std::vector<double> phi(d.nx * d.ny, 0.0);
    for (std::size_t c = 0; c < phi.size(); ++c) {
        if (d.fixed[c]) phi[c] = *d.fixed[c];
    }
    return phi;
}

// Calls visit(cell, energy) for every half-cell energy contribution (J/m, eps0 included).
template <typename Visit>
void for_each_half_energy(const Discretization& d, const FieldSolution& s, Visit&& visit) {
    const double eps0 = constants::vacuum_permittivity;
    auto phi_or_zero = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        if (i < 0 || j < 0 || i >= static_cast<std::ptrdiff_t>(d.nx) || j >= static_cast<std::ptrdiff_t>(d.ny)) {
            return 0.0;  // grounded wall; open walls carry no flux so the value is unused
        }
        return s.potential[d.cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
    };
    auto face = [&](double g, std::ptrdiff_t ia, std::ptrdiff_t ja, std::ptrdiff_t ib, std::ptrdiff_t jb,
                    double half_a, double half_b) {
        if (g == 0.0) return;
        const double flux = g * (phi_or_zero(ia, ja) - phi_or_zero(ib, jb));
        // Energy in a half cell is flux^2 / (2 g_half); fixed cells and walls hold none.
        if (std::isfinite(half_a)) visit(d.cell(static_cast<std::size_t>(ia), static_cast<std::size_t>(ja)),
                                          eps0 * 0.5 * flux * flux / half_a);
        if (std::isfinite(half_b)) visit(d.cell(static_cast<std::size_t>(ib), static_cast<std::size_t>(jb)),
                                          eps0 * 0.5 * flux * flux / half_b);
    };
    for (std::size_t j = 0; j < d.ny; ++j) {
        for (std::size_t i = 0; i <= d.nx; ++i) {
            const auto si = static_cast<std::ptrdiff_t>(i);
            const auto sj = static_cast<std::ptrdiff_t>(j);
            const double ha = i > 0 ? d.half_x[d.cell(i - 1, j)] : kInfinite;
            const double hb = i < d.nx ? d.half_x[d.cell(i, j)] : kInfinite;
            face(d.face_x[d.fx(i, j)], si - 1, sj, si, sj, ha, hb);
        }
    }
    for (std::size_t j = 0; j <= d.ny; ++j) {
        for (std::size_t i = 0; i < d.nx; ++i) {
            const auto si = static_cast<std::ptrdiff_t>(i);
            const auto sj = static_cast<std::ptrdiff_t>(j);
            const double ha = j > 0 ? d.half_y[d.cell(i, j - 1)] : kInfinite;
            const double hb = j < d.ny ? d.half_y[d.cell(i, j)] : kInfinite;
            face(d.face_y[d.fy(i, j)], si, sj - 1, si, sj, ha, hb);
        }
    }
}

void check_solution_shape(const CrossSection& cs, const FieldSolution& s) {
    if (s.nx != cs.nx() || s.ny != cs.ny() || s.potential.size() != s.nx * s.ny) {
        throw ValidationError("field solution does not match the cross-section grid");
    }
}

}  // namespace

CrossSection CrossSection::vacuum_copy() const {
    CrossSection copy = *this;
    for (auto& r : copy.regions) r.eps_r = 1.0;
    return copy;
}

std::vector<double> uniform_axis(double lo, double hi, std::size_t cells) {
    if (cells == 0 || !(hi > lo)) throw DomainError("uniform axis needs hi > lo and at least one cell");
    std::vector<double> lines(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) lines[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
    lines.back() = hi;
    return lines;
}

std::vector<double> graded_axis(const std::vector<double>& breaks, double h_fine, double growth, double h_max) {
    if (breaks.size() < 2) throw DomainError("graded axis needs at least two break points");
    if (!(h_fine > 0.0) || !(growth >= 1.0) || !(h_max >= h_fine)) {
        throw DomainError("graded axis needs h_fine > 0, growth >= 1, h_max >= h_fine");
    }
    std::vector<double> lines{breaks.front()};
    for (std::size_t b = 1; b < breaks.size(); ++b) {
        const double a = breaks[b - 1];
        const double length = breaks[b] - a;
        if (!(length > 0.0)) throw DomainError("graded axis break points must be strictly ascending");

        auto profile = [&](std::size_t n) {
            std::vector<double> sizes(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double steps = static_cast<double>(std::min(k, n - 1 - k));
                sizes[k] = std::min(h_fine * std::pow(growth, steps), h_max);
            }
            return sizes;
        };
        std::size_t n = 1;
        std::vector<double> sizes = profile(n);
        auto total = [](const std::vector<double>& v) {
            double t = 0.0;
            for (double x : v) t += x;
            return t;
        };
        while (total(sizes) < length) sizes = profile(++n);
        // Shrink the last profile to fit exactly.
        const double scale = length / total(sizes);
        double x = a;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            x += sizes[k] * scale;
            lines.push_back(x);
        }
        lines.push_back(breaks[b]);
    }
    return lines;
}

void validate(const CrossSection& cs) { (void)discretize(cs); }

FieldSolution solve_potential(const CrossSection& cs, const SolverOptions& options) {
    if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
        throw DomainError("solver needs a positive tolerance and iteration budget");
    }
    if (!(options.relaxation > 0.0 && options.relaxation < 2.0)) {
        throw DomainError("SOR relaxation factor must lie in (0, 2)");
    }
    const Discretization d = discretize(cs);

    FieldSolution out;
    out.nx = d.nx;
    out.ny = d.ny;
    out.potential = initial_potential(d);
    out.relaxation_used = options.relaxation;
    SweepResult r = relax(d, out.potential, options.relaxation, options);
    if (r.diverged) {
        // Fall back to plain Gauss-Seidel from a fresh start.
        out.potential = initial_potential(d);
        out.relaxation_used = 1.0;
        r = relax(d, out.potential, 1.0, options);
    }
    out.converged = r.converged;
    out.iterations = r.iterations;
    out.residual = r.residual;
    if (!r.converged) {
        throw ConvergenceError(fmt::format("Laplace solve did not converge in {} iterations (max update {:.3e})",
                                           r.iterations, r.residual),
                               r.residual, r.iterations);
    }
    return out;
}

double stored_energy(const CrossSection& cs, const FieldSolution& solution) {
    check_solution_shape(cs, solution);
    const Discretization d = discretize(cs);
    double total = 0.0;
    for_each_half_energy(d, solution, [&](std::size_t, double e) { total += e; });
    return total;
}

double capacitance_per_length(const CrossSection& cs, const SolverOptions& options) {
    const double v = potential_spread(cs);
    if (!(v > 0.0)) throw DegenerateError("capacitance needs at least two distinct conductor potentials");
    const FieldSolution s = solve_potential(cs, options);
    return 2.0 * stored_energy(cs, s) / (v * v);
}

EpsEffZ0 extract_eps_eff_and_z0(const CrossSection& cs, const SolverOptions& options) {
    EpsEffZ0 out{};
    out.capacitance = capacitance_per_length(cs, options);
    bool all_vacuum = std::all_of(cs.regions.begin(), cs.regions.end(), [](const auto& r) { return r.eps_r == 1.0; });
    out.capacitance_vacuum = all_vacuum ? out.capacitance : capacitance_per_length(cs.vacuum_copy(), options);
    out.eps_eff = all_vacuum ? 1.0 : out.capacitance / out.capacitance_vacuum;
    out.z0 = 1.0 / (constants::speed_of_light * std::sqrt(out.capacitance * out.capacitance_vacuum));
    return out;
}

std::map<std::string, double> energy_participation(const CrossSection& cs, const FieldSolution& solution) {
    check_solution_shape(cs, solution);
    const Discretization d = discretize(cs);
    std::vector<double> per_region(cs.regions.size(), 0.0);
    for_each_half_energy(d, solution, [&](std::size_t cell, double e) {
        per_region[static_cast<std::size_t>(d.region[cell])] += e;
    });
    double total = 0.0;
    for (double e : per_region) total += e;
    if (!(total > 0.0)) throw DegenerateError("zero stored energy; participation is undefined");

    std::map<std::string, double> out;
    for (const auto& r : cs.regions) out[r.name] = 0.0;
    for (std::size_t r = 0; r < per_region.size(); ++r) out[cs.regions[r].name] += per_region[r] / total;
    return out;
}

void write_potential_csv(std::ostream& out, const CrossSection& cs, const FieldSolution& solution) {
    check_solution_shape(cs, solution);
    out << "x,y,V\n";
    for (std::size_t j = 0; j < solution.ny; ++j) {
        const double yc = 0.5 * (cs.y_lines[j] + cs.y_lines[j + 1]);
        for (std::size_t i = 0; i < solution.nx; ++i) {
            const double xc = 0.5 * (cs.x_lines[i] + cs.x_lines[i + 1]);
            out << fmt::format("{:.12g},{:.12g},{:.12g}\n", xc, yc, solution.at(i, j));
        }
    }
}

CrossSection cpw_cross_section(double trace_width, double trace_gap, double eps_substrate, double eps_superstrate,
                               const CpwSectionOptions& options) {
    if (!(trace_width > 0.0) || !(trace_gap > 0.0)) throw DomainError("CPW section needs w > 0 and s > 0");
    if (!(options.margin_factor >= 1.0) || !(options.h_fine_fraction > 0.0) || !(options.metal_thickness_cells > 0.0)) {
        throw DomainError("invalid CPW section options");
    }
    const double aperture = trace_width + 2.0 * trace_gap;
    const double half_box = options.margin_factor * aperture;
    const double h_fine = options.h_fine_fraction * trace_width;
    const double t = options.metal_thickness_cells * h_fine;
    const double h_max = 2.0 * aperture;
    const double edge = 0.5 * trace_width;

    CrossSection cs;
    cs.x_lines = graded_axis({-half_box, -edge - trace_gap, -edge, edge, edge + trace_gap, half_box}, h_fine,
                             options.growth, h_max);
    cs.y_lines = graded_axis({-half_box, 0.0, t, half_box}, h_fine, options.growth, h_max);
    cs.regions = {
        {"substrate", {-half_box, -half_box, half_box, 0.0}, eps_substrate},
        {"superstrate", {-half_box, 0.0, half_box, half_box}, eps_superstrate},
    };
    cs.conductors = {
        {"signal", {-edge, 0.0, edge, t}, 1.0},
        {"ground_left", {-half_box, 0.0, -edge - trace_gap, t}, 0.0},
        {"ground_right", {edge + trace_gap, 0.0, half_box, t}, 0.0},
    };
    return cs;
}

}  // namespace flipkit::fieldsolve
