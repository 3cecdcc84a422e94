#include "flipkit/loss.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"

namespace flipkit::loss {

namespace {

// Relative residuals below this are floating-point rounding, not curvature.
constexpr double kRoundingFloor = 1e-13;

LossRegion& find_region(LossBudget& budget, const std::string& name) {
    const auto it = std::find_if(budget.regions.begin(), budget.regions.end(),
                                 [&](const LossRegion& r) { return r.name == name; });
    if (it == budget.regions.end()) throw DomainError(fmt::format("loss budget has no region '{}'", name));
    return *it;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw DomainError("loss-tangent grid is empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0)) throw DomainError("loss tangents must be non-negative");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw DomainError("loss-tangent grid must be strictly ascending");
    }
}

}  // namespace

void LossBudget::validate() const {
    if (!(mode_frequency > 0.0)) throw DomainError("mode frequency must be positive");
    if (!(baseline_q > 0.0)) throw DomainError("baseline Q must be positive");
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    double total = 0.0;
    for (const auto& r : regions) {
        if (!(r.participation >= 0.0) || !(r.participation <= 1.0)) {
            throw DomainError(fmt::format("participation of '{}' outside [0, 1]", r.name));
        }
        if (!(r.loss_tangent >= 0.0)) throw DomainError(fmt::format("loss tangent of '{}' is negative", r.name));
        total += r.participation;
    }
    if (total > 1.0 + 1e-9) throw DomainError(fmt::format("participations sum to {} > 1", total));
}

double t1_upper_bound(double q, double frequency) {
    if (!(q > 0.0) || !(frequency > 0.0)) throw DomainError("T1 bound needs Q > 0 and f > 0");
    return q / (2.0 * constants::pi * frequency);
}

double dielectric_decay_rate(const LossBudget& budget) {
    budget.validate();
    double weighted = 0.0;
    for (const auto& r : budget.regions) weighted += r.participation * r.loss_tangent;
    return budget.eta * 2.0 * constants::pi * budget.mode_frequency * weighted;
}

double q_with_dielectric(const LossBudget& budget) {
    budget.validate();
    double inverse = 1.0 / budget.baseline_q;
    for (const auto& r : budget.regions) inverse += r.participation * r.loss_tangent;
    return 1.0 / inverse;
}

std::vector<LossRow> t1_vs_loss_tangent(const LossBudget& budget, const std::string& region,
                                        const std::vector<double>& tan_delta_grid) {
    check_grid(tan_delta_grid);
    LossBudget working = budget;
    LossRegion& swept = find_region(working, region);
    std::vector<LossRow> rows;
    rows.reserve(tan_delta_grid.size());
    for (double td : tan_delta_grid) {
        swept.loss_tangent = td;
        const double q = q_with_dielectric(working);
        rows.push_back({td, q, t1_upper_bound(q, working.mode_frequency), dielectric_decay_rate(working)});
    }
    return rows;
}

void write_loss_csv(std::ostream& out, const std::vector<LossRow>& rows) {
    out << "tan_delta,q_total,t1_upper_s,gamma_cap_per_s\n";
    for (const auto& r : rows) {
        out << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g}\n", r.tan_delta, r.q_total, r.t1_upper_s,
                           r.gamma_cap_per_s);
    }
}

double gamma_linearity_check(const LossBudget& budget, const std::string& region,
                             const std::vector<double>& tan_delta_grid, const ParticipationModel& participation) {
    check_grid(tan_delta_grid);
    if (tan_delta_grid.back() > 0.1) throw DomainError("linearity check is defined for tan(delta) in [0, 0.1]");
    LossBudget working = budget;
    LossRegion& swept = find_region(working, region);

    std::vector<double> gamma(tan_delta_grid.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < tan_delta_grid.size(); ++k) {
        const double td = tan_delta_grid[k];
        swept.loss_tangent = td;
        if (participation) swept.participation = participation(td);
        gamma[k] = dielectric_decay_rate(working);
        num += gamma[k] * td;
        den += td * td;
    }
    if (!(den > 0.0)) throw DomainError("linearity check needs at least one non-zero loss tangent");
    const double slope = num / den;
    double scale = 0.0;
    for (double g : gamma) scale = std::max(scale, std::abs(g));
    if (!(scale > 0.0)) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        worst = std::max(worst, std::abs(gamma[k] - slope * tan_delta_grid[k]) / scale);
    }
    return worst < kRoundingFloor ? 0.0 : worst;
}

}  // namespace flipkit::loss
