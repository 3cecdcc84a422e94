#pragma once

#include <complex>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "flipkit/numerics.hpp"

namespace flipkit::network {

using complex = std::complex<double>;

/// Two-port chain matrix [[a, b], [c, d]]; b in ohm, c in siemens.
struct TwoPortABCD {
    complex a{1.0, 0.0};
    complex b{0.0, 0.0};
    complex c{0.0, 0.0};
    complex d{1.0, 0.0};

    complex determinant() const { return a * d - b * c; }
    static TwoPortABCD identity() { return {}; }
};

/// Ordered matrix product (left network first).
TwoPortABCD operator*(const TwoPortABCD& lhs, const TwoPortABCD& rhs);

struct SParameters {
    complex s11, s12, s21, s22;
};

/// Sampled complex S-parameters on an ascending frequency grid.
class FrequencyResponse {
public:
    FrequencyResponse(std::vector<double> frequencies, double reference_impedance);

    const std::vector<double>& frequencies() const noexcept { return frequencies_; }
    double reference_impedance() const noexcept { return z_ref_; }

    /// Adds a named trace ("s11", "s21", ...); length must match the grid.
    void add(std::string name, std::vector<complex> values);
    const std::vector<complex>& trace(const std::string& name) const;
    bool has(const std::string& name) const;
    const std::vector<std::string>& names() const noexcept { return names_; }

    /// CSV with header freq_hz,<name>_re,<name>_im,... in insertion order.
    void write_csv(std::ostream& out) const;

private:
    std::vector<double> frequencies_;
    double z_ref_;
    std::vector<std::string> names_;
    std::vector<std::vector<complex>> traces_;
};

/// Side-coupled resonator seen through a feedline.
struct NotchResonator {
    double resonant_frequency = 0.0;  // f_r, Hz
    double loaded_q = 0.0;
    double coupling_q = 0.0;
    double dispersive_shift = 0.0;    // chi, Hz (signed)
    int qubit_state = 0;              // 0 or 1

    void validate() const;
    /// Dip location: f_r + chi for |0>, f_r - chi for |1>.
    double dip_frequency() const;
};

struct QExtraction {
    double resonant_frequency;  // Hz, sample of minimum |S21|
    double quality_factor;
    double bandwidth;           // Hz, between the -3 dB crossings
};

/// Lossless line section: a = d = cos(bl), b = j z0 sin(bl), c = j sin(bl) / z0.
TwoPortABCD tline_abcd(double z0, double electrical_length);

TwoPortABCD cascade(std::span<const TwoPortABCD> sections);

/// ABCD -> S at a single explicit real reference impedance (no renormalization).
SParameters abcd_to_s(const TwoPortABCD& two_port, double z_ref);

/// S21(f) = 1 - (Q_l/Q_c) / (1 + 2j Q_l (f - f_d) / f_d). Trace name "s21".
FrequencyResponse notch_s21(const NotchResonator& resonator, const std::vector<double>& grid,
                            double z_ref = 50.0);

/// Uniform grid of `points` samples spanning +/- `linewidths` loaded linewidths around the dip.
std::vector<double> notch_grid(const NotchResonator& resonator, double linewidths = 10.0, int points = 2001);

/// FWHM quality factor from the absolute -3 dB crossings of |trace|, linearly interpolated in dB.
QExtraction extract_q_fwhm(const FrequencyResponse& response, const std::string& trace = "s21");

/// Linearly spaced grid, both ends included.
std::vector<double> linear_grid(double lo, double hi, int points);

/// |S11| in dB, floored at -300 dB for an exact match.
double s11_db(const SParameters& s);

/// Worst-case |S11| (dB) over `band` for a lossless line of impedance line_z0,
/// physical length line_length and eps_eff, converted at z_ref = z_port.
double worst_case_reflection(double line_z0, double z_port, const numerics::RealInterval& band, double line_length,
                             double eps_eff, int points = 801);

struct MatchPoint {
    double z_port;
    double worst_s11_db;
};

struct MatchSweep {
    std::vector<MatchPoint> points;
    double best_z_port;
    double best_worst_s11_db;
};

/// worst_case_reflection over an inclusive z_port grid [z_min, z_max] with the given step.
MatchSweep match_sweep(double line_z0, double z_min, double z_max, double step, const numerics::RealInterval& band,
                       double line_length, double eps_eff);

/// Two feedlines, each loaded by a capacitively coupled parallel-LCR notch, with the
/// two resonator nodes bridged by cg. The bridge pulls the near-side mode down by about
/// cg / 2C; the far-side S43 minimum is located in a window covering that pull and the
/// drop (dB) there relative to cg = 0 is returned. Exactly 0 at cg = 0.
double crosstalk_dip(double coupling_capacitance, const NotchResonator& near_side, const NotchResonator& far_side,
                     double z_feed = 50.0);

/// Far-side transmission |S43| in dB across a grid (the curve behind crosstalk_dip).
std::vector<double> crosstalk_far_transmission_db(double coupling_capacitance, const NotchResonator& near_side,
                                                  const NotchResonator& far_side, const std::vector<double>& grid,
                                                  double z_feed = 50.0);

}  // namespace flipkit::network
