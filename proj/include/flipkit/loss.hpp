#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace flipkit::loss {

struct LossRegion {
    std::string name;
    double participation = 0.0;  // p_i in [0, 1]
    double loss_tangent = 0.0;   // tan(delta_i) >= 0
};

struct LossBudget {
    double mode_frequency = 0.0;  // Hz
    double baseline_q = 0.0;      // Q with every loss tangent at zero
    std::vector<LossRegion> regions;
    double eta = 1.0;             // ~1 for a transmon

    void validate() const;
};

struct LossRow {
    double tan_delta;
    double q_total;
    double t1_upper_s;
    double gamma_cap_per_s;
};

/// T1 < Q / (2 pi f).
double t1_upper_bound(double q, double frequency);

/// Gamma_cap = eta * 2 pi f * sum_i p_i tan(delta_i), in 1/s.
double dielectric_decay_rate(const LossBudget& budget);

/// 1/Q = 1/baseline_Q + sum_i p_i tan(delta_i).
double q_with_dielectric(const LossBudget& budget);

/// Sets `region`'s loss tangent to each grid value in turn (grid ascending).
std::vector<LossRow> t1_vs_loss_tangent(const LossBudget& budget, const std::string& region,
                                        const std::vector<double>& tan_delta_grid);

/// Writes tan_delta,q_total,t1_upper_s,gamma_cap_per_s rows.
void write_loss_csv(std::ostream& out, const std::vector<LossRow>& rows);

/// Participation of the swept region as a function of its loss tangent.
using ParticipationModel = std::function<double(double tan_delta)>;

/// Least-squares slope of Gamma(tan d) through the origin, then the max of
/// |Gamma - slope * tan d| / max|Gamma| over the grid. Exactly 0 when p is constant.
double gamma_linearity_check(const LossBudget& budget, const std::string& region,
                             const std::vector<double>& tan_delta_grid,
                             const ParticipationModel& participation = nullptr);

}  // namespace flipkit::loss
