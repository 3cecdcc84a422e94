#include "flipkit/network.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"

namespace flipkit::network {

namespace {

constexpr complex j{0.0, 1.0};
const double kHalfPowerDb = -10.0 * std::log10(2.0);  // the "-3 dB" point, taken as exact half power
constexpr double kDbFloor = -300.0;

double magnitude_db(complex s) { return std::max(20.0 * std::log10(std::abs(s)), kDbFloor); }

// Dense complex solve by Gaussian elimination with partial pivoting; tiny systems only.
template <std::size_t N>
std::array<complex, N> solve_linear(std::array<std::array<complex, N>, N> a, std::array<complex, N> rhs) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) == 0.0) throw DegenerateError("singular nodal admittance matrix");
        std::swap(a[col], a[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const complex factor = a[r][col] / a[col][col];
            for (std::size_t k = col; k < N; ++k) a[r][k] -= factor * a[col][k];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::array<complex, N> x{};
    for (std::size_t row = N; row-- > 0;) {
        complex sum = rhs[row];
        for (std::size_t k = row + 1; k < N; ++k) sum -= a[row][k] * x[k];
        x[row] = sum / a[row][row];
    }
    return x;
}

// Lumped equivalent of a notch: parallel LCR tank behind a coupling capacitor to the feedline.
struct LumpedNotch {
    double omega0;
    double tank_capacitance;
    double tank_inductance;
    double tank_conductance;
    double coupling_capacitance;

    complex tank_admittance(double omega) const {
        return tank_conductance + j * omega * tank_capacitance + 1.0 / (j * omega * tank_inductance);
    }
};

LumpedNotch lumped_notch(const NotchResonator& res, double z_feed) {
    res.validate();
    LumpedNotch n{};
    n.omega0 = 2.0 * constants::pi * res.dip_frequency();
    // Quarter-wave line of impedance z_feed mapped onto a parallel tank near its first resonance.
    n.tank_capacitance = constants::pi / (4.0 * n.omega0 * z_feed);
    // The feedline loads the tank through C_k with R = z_feed / 2, giving
    // 1/Q_c = omega C_k^2 R / (C + C_k); solve the quadratic for C_k.
    const double w_r_qc = n.omega0 * 0.5 * z_feed * res.coupling_q;
    n.coupling_capacitance = (1.0 + std::sqrt(1.0 + 4.0 * w_r_qc * n.tank_capacitance)) / (2.0 * w_r_qc);
    const double c_total = n.tank_capacitance + n.coupling_capacitance;
    n.tank_inductance = 1.0 / (n.omega0 * n.omega0 * c_total);
    const double inv_qi = std::max(1.0 / res.loaded_q - 1.0 / res.coupling_q, 0.0);
    n.tank_conductance = n.omega0 * c_total * inv_qi;
    return n;
}

// S43 of the far feedline with both assemblies bridged by cg.
complex far_transmission(double cg, const LumpedNotch& near, const LumpedNotch& far, double omega, double z_feed) {
    using Matrix = std::array<std::array<complex, 4>, 4>;
    const complex yk_near = j * omega * near.coupling_capacitance;
    const complex yk_far = j * omega * far.coupling_capacitance;
    const complex yg = j * omega * cg;
    const double y_feed = 2.0 / z_feed;  // both ports of a feedline terminated in z_feed
    // Node order: near feed, near tank, far tank, far feed.
    Matrix y{};
    y[0][0] = y_feed + yk_near;
    y[0][1] = y[1][0] = -yk_near;
    y[1][1] = yk_near + near.tank_admittance(omega) + yg;
    y[1][2] = y[2][1] = -yg;
    y[2][2] = yk_far + far.tank_admittance(omega) + yg;
    y[2][3] = y[3][2] = -yk_far;
    y[3][3] = y_feed + yk_far;
    // Unit source behind z_feed on the far line's input port (Norton equivalent).
    const auto v = solve_linear<4>(y, {0.0, 0.0, 0.0, 1.0 / z_feed});
    return 2.0 * v[3];
}

}  // namespace

TwoPortABCD operator*(const TwoPortABCD& l, const TwoPortABCD& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
}

FrequencyResponse::FrequencyResponse(std::vector<double> frequencies, double reference_impedance)
    : frequencies_(std::move(frequencies)), z_ref_(reference_impedance) {
    if (frequencies_.empty()) throw DomainError("frequency grid is empty");
    for (std::size_t k = 1; k < frequencies_.size(); ++k) {
        if (!(frequencies_[k] > frequencies_[k - 1])) throw DomainError("frequency grid must be strictly ascending");
    }
    if (!(z_ref_ > 0.0)) throw DomainError("reference impedance must be positive");
}

void FrequencyResponse::add(std::string name, std::vector<complex> values) {
    if (values.size() != frequencies_.size()) {
        throw DomainError(fmt::format("trace '{}' has {} samples, grid has {}", name, values.size(), frequencies_.size()));
    }
    if (has(name)) throw DomainError(fmt::format("trace '{}' already present", name));
    names_.push_back(std::move(name));
    traces_.push_back(std::move(values));
}

bool FrequencyResponse::has(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<complex>& FrequencyResponse::trace(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DomainError(fmt::format("response has no trace '{}'", name));
    return traces_[static_cast<std::size_t>(it - names_.begin())];
}

void FrequencyResponse::write_csv(std::ostream& out) const {
    out << "freq_hz";
    for (const auto& n : names_) out << ',' << n << "_re," << n << "_im";
    out << '\n';
    for (std::size_t k = 0; k < frequencies_.size(); ++k) {
        out << fmt::format("{:.12g}", frequencies_[k]);
        for (const auto& t : traces_) out << fmt::format(",{:.12g},{:.12g}", t[k].real(), t[k].imag());
        out << '\n';
    }
}

void NotchResonator::validate() const {
    if (!(resonant_frequency > 0.0)) throw DomainError("resonant frequency must be positive");
    if (!(loaded_q > 0.0) || !(coupling_q > 0.0)) throw DomainError("quality factors must be positive");
    if (loaded_q > coupling_q * (1.0 + 1e-12)) {
        throw DomainError(fmt::format("loaded Q {} exceeds coupling Q {}", loaded_q, coupling_q));
    }
    if (qubit_state != 0 && qubit_state != 1) throw DomainError("qubit state must be 0 or 1");
    if (!(dip_frequency() > 0.0)) throw DomainError("dispersive shift moves the dip below zero frequency");
}

double NotchResonator::dip_frequency() const {
    return resonant_frequency + dispersive_shift * (qubit_state == 0 ? 1.0 : -1.0);
}

TwoPortABCD tline_abcd(double z0, double electrical_length) {
    if (!(z0 > 0.0)) throw DomainError("line impedance must be positive");
    const double c = std::cos(electrical_length);
    const double s = std::sin(electrical_length);
    return {c, j * z0 * s, j * s / z0, c};
}

TwoPortABCD cascade(std::span<const TwoPortABCD> sections) {
    if (sections.empty()) throw DomainError("cascade needs at least one section");
    TwoPortABCD out = sections.front();
    for (std::size_t k = 1; k < sections.size(); ++k) out = out * sections[k];
    return out;
}

SParameters abcd_to_s(const TwoPortABCD& t, double z_ref) {
    if (!(z_ref > 0.0)) throw DomainError("reference impedance must be positive");
    const complex denom = t.a + t.b / z_ref + t.c * z_ref + t.d;
    if (std::abs(denom) < 1e-300) throw DegenerateError("ABCD to S conversion is singular");
    return {
        (t.a + t.b / z_ref - t.c * z_ref - t.d) / denom,
        2.0 * t.determinant() / denom,
        2.0 / denom,
        (-t.a + t.b / z_ref - t.c * z_ref + t.d) / denom,
    };
}

FrequencyResponse notch_s21(const NotchResonator& res, const std::vector<double>& grid, double z_ref) {
    res.validate();
    FrequencyResponse response(grid, z_ref);
    const double fd = res.dip_frequency();
    const double depth = res.loaded_q / res.coupling_q;
    std::vector<complex> s21(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        s21[k] = 1.0 - depth / (1.0 + 2.0 * j * res.loaded_q * (grid[k] - fd) / fd);
    }
    response.add("s21", std::move(s21));
    return response;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw DomainError("linear grid needs hi > lo and at least two points");
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
    g.back() = hi;
    return g;
}

std::vector<double> notch_grid(const NotchResonator& res, double linewidths, int points) {
    res.validate();
    const double fd = res.dip_frequency();
    const double half_span = linewidths * fd / res.loaded_q;
    return linear_grid(fd - half_span, fd + half_span, points);
}

QExtraction extract_q_fwhm(const FrequencyResponse& response, const std::string& trace_name) {
    const auto& f = response.frequencies();
    const auto& trace = response.trace(trace_name);
    if (f.size() < 3) throw ExtractionError("need at least three samples to locate a dip");
    std::vector<double> db(trace.size());
    std::transform(trace.begin(), trace.end(), db.begin(), magnitude_db);

    const auto min_it = std::min_element(db.begin(), db.end());
    const auto imin = static_cast<std::size_t>(min_it - db.begin());
    if (!(*min_it < kHalfPowerDb)) {
        throw ExtractionError(fmt::format("no dip below {:.4f} dB (minimum {:.4f} dB)", kHalfPowerDb, *min_it));
    }
    int segments = 0;
    for (std::size_t k = 0; k < db.size(); ++k) {
        if (db[k] < kHalfPowerDb && (k == 0 || db[k - 1] >= kHalfPowerDb)) ++segments;
    }
    if (segments > 1) throw ExtractionError(fmt::format("ambiguous response: {} separate dips below -3 dB", segments));

    std::size_t lo = imin;
    while (lo > 0 && db[lo - 1] < kHalfPowerDb) --lo;
    std::size_t hi = imin;
    while (hi + 1 < db.size() && db[hi + 1] < kHalfPowerDb) ++hi;
    if (lo == 0 || hi + 1 == db.size()) {
        throw ExtractionError("dip does not recover above -3 dB inside the frequency window");
    }
    // Crossing between a sample at/above -3 dB and its neighbour below it.
    auto crossing = [&](std::size_t above, std::size_t below) {
        const double t = (kHalfPowerDb - db[above]) / (db[below] - db[above]);
        return f[above] + t * (f[below] - f[above]);
    };
    const double f_lo = crossing(lo - 1, lo);
    const double f_hi = crossing(hi + 1, hi);
    const double bw = f_hi - f_lo;
    if (!(bw > 0.0)) throw ExtractionError("non-positive bandwidth");
    return {f[imin], f[imin] / bw, bw};
}

double s11_db(const SParameters& s) { return magnitude_db(s.s11); }

double worst_case_reflection(double line_z0, double z_port, const numerics::RealInterval& band, double line_length,
                             double eps_eff, int points) {
    if (band.lo() < 1e9 || band.hi() > 20e9) throw DomainError("matching band must lie within [1, 20] GHz");
    if (!(line_length > 0.0)) throw DomainError("line length must be positive");
    if (!(eps_eff >= 1.0)) throw DomainError("eps_eff must be >= 1");
    const double beta_per_hz = 2.0 * constants::pi * std::sqrt(eps_eff) / constants::speed_of_light;
    double worst = kDbFloor;
    for (double freq : linear_grid(band.lo(), band.hi(), points)) {
        const SParameters s = abcd_to_s(tline_abcd(line_z0, beta_per_hz * freq * line_length), z_port);
        worst = std::max(worst, s11_db(s));
    }
    return worst;
}

MatchSweep match_sweep(double line_z0, double z_min, double z_max, double step, const numerics::RealInterval& band,
                       double line_length, double eps_eff) {
    if (!(step > 0.0) || !(z_max > z_min) || !(z_min > 0.0)) throw DomainError("invalid port impedance sweep");
    const auto count = static_cast<std::size_t>(std::llround((z_max - z_min) / step)) + 1;
    MatchSweep out{};
    out.points.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double z = z_min + static_cast<double>(k) * step;
        out.points.push_back({z, worst_case_reflection(line_z0, z, band, line_length, eps_eff)});
    }
    const auto best = std::min_element(out.points.begin(), out.points.end(),
                                       [](const auto& x, const auto& y) { return x.worst_s11_db < y.worst_s11_db; });
    out.best_z_port = best->z_port;
    out.best_worst_s11_db = best->worst_s11_db;
    return out;
}

std::vector<double> crosstalk_far_transmission_db(double cg, const NotchResonator& near_side,
                                                  const NotchResonator& far_side, const std::vector<double>& grid,
                                                  double z_feed) {
    if (!(cg >= 0.0)) throw DomainError("coupling capacitance must be non-negative");
    if (!(z_feed > 0.0)) throw DomainError("feedline impedance must be positive");
    const LumpedNotch near = lumped_notch(near_side, z_feed);
    const LumpedNotch far = lumped_notch(far_side, z_feed);
    std::vector<double> out;
    out.reserve(grid.size());
    for (double freq : grid) {
        out.push_back(magnitude_db(far_transmission(cg, near, far, 2.0 * constants::pi * freq, z_feed)));
    }
    return out;
}

double crosstalk_dip(double cg, const NotchResonator& near_side, const NotchResonator& far_side, double z_feed) {
    if (!(cg >= 0.0)) throw DomainError("coupling capacitance must be non-negative");
    if (!(z_feed > 0.0)) throw DomainError("feedline impedance must be positive");
    const LumpedNotch near = lumped_notch(near_side, z_feed);
    const LumpedNotch far = lumped_notch(far_side, z_feed);
    auto bridged = [&](double f) { return magnitude_db(far_transmission(cg, near, far, 2.0 * constants::pi * f, z_feed)); };
    auto isolated = [&](double f) { return magnitude_db(far_transmission(0.0, near, far, 2.0 * constants::pi * f, z_feed)); };

    const double fd = near_side.dip_frequency();
    const double linewidth = fd / near_side.loaded_q;
    const double pull = fd * cg / (near.tank_capacitance + near.coupling_capacitance);
    const double lo = fd - pull - 20.0 * linewidth;
    const double hi = fd + 20.0 * linewidth;
    const auto n = static_cast<int>(std::ceil((hi - lo) / (0.05 * linewidth))) + 1;
    const auto grid = linear_grid(lo, hi, n);

    std::size_t best = 0;
    double best_db = bridged(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double v = bridged(grid[k]);
        if (v < best_db) {
            best_db = v;
            best = k;
        }
    }
    // Golden-section refinement between the neighbouring samples.
    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = bridged(c);
    double fdv = bridged(d);
    for (int it = 0; it < 80 && (b - a) > 1e-9 * linewidth; ++it) {
        if (fc < fdv) {
            b = d;
            d = c;
            fdv = fc;
            c = b - inv_phi * (b - a);
            fc = bridged(c);
        } else {
            a = c;
            c = d;
            fc = fdv;
            d = a + inv_phi * (b - a);
            fdv = bridged(d);
        }
    }
    double f_star = 0.5 * (a + b);
    if (bridged(grid[best]) < bridged(f_star)) f_star = grid[best];
    return isolated(f_star) - bridged(f_star);
}

}  // namespace flipkit::network
