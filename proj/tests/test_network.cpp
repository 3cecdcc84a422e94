#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "flipkit/errors.hpp"
#include "flipkit/network.hpp"

using namespace flipkit;
using namespace flipkit::network;

namespace {

const double kPi = std::acos(-1.0);

bool near(complex a, complex b, double tol) { return std::abs(a - b) <= tol; }

// Notch transmission written out directly.
complex notch_oracle(double f, double fd, double ql, double qc) {
    return 1.0 - (ql / qc) / (1.0 + complex(0.0, 2.0 * ql * (f - fd) / fd));
}

NotchResonator notch(double fr, double ql, double qc) {
    NotchResonator r;
    r.resonant_frequency = fr;
    r.loaded_q = ql;
    r.coupling_q = qc;
    return r;
}

}  // namespace

TEST(Abcd, LineSpecialLengths) {
    const auto id = tline_abcd(50.0, 0.0);
    EXPECT_TRUE(near(id.a, 1.0, 1e-15) && near(id.b, 0.0, 1e-15) && near(id.c, 0.0, 1e-15) && near(id.d, 1.0, 1e-15));
    const auto q = tline_abcd(50.0, kPi / 2);
    EXPECT_TRUE(near(q.a, 0.0, 1e-15));
    EXPECT_TRUE(near(q.d, 0.0, 1e-15));
    EXPECT_TRUE(near(q.b, complex(0.0, 50.0), 1e-12));
    EXPECT_TRUE(near(q.c, complex(0.0, 1.0 / 50.0), 1e-15));
}

TEST(Abcd, CascadeGroupProperty) {
    const auto half = tline_abcd(37.0, 0.4);
    const std::vector<TwoPortABCD> two{half, half};
    const auto whole = tline_abcd(37.0, 0.8);
    const auto c = cascade(two);
    EXPECT_TRUE(near(c.a, whole.a, 1e-12) && near(c.b, whole.b, 1e-12) && near(c.c, whole.c, 1e-12) &&
                near(c.d, whole.d, 1e-12));

    const std::vector<TwoPortABCD> undo{tline_abcd(37.0, 1.1), tline_abcd(37.0, -1.1)};
    const auto u = cascade(undo);
    EXPECT_TRUE(near(u.a, 1.0, 1e-10) && near(u.b, 0.0, 1e-10) && near(u.c, 0.0, 1e-10) && near(u.d, 1.0, 1e-10));

    const std::vector<TwoPortABCD> with_id{TwoPortABCD::identity(), half};
    const auto x = cascade(with_id);
    EXPECT_TRUE(near(x.b, half.b, 1e-15));
    EXPECT_TRUE(near(cascade(two).determinant(), 1.0, 1e-12));
}

TEST(Abcd, ToSParameters) {
    const auto id = abcd_to_s(TwoPortABCD::identity(), 50.0);
    EXPECT_TRUE(near(id.s11, 0.0, 1e-15));
    EXPECT_TRUE(near(id.s21, 1.0, 1e-15));

    for (double bl : {0.1, 1.0, 2.5}) {
        const auto s = abcd_to_s(tline_abcd(50.0, bl), 50.0);
        EXPECT_NEAR(std::abs(s.s11), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(s.s21), 1.0, 1e-12);
    }
    const double z0 = 49.53;
    const double zr = 48.4;
    const auto s = abcd_to_s(tline_abcd(z0, kPi / 2), zr);
    EXPECT_NEAR(std::abs(s.s11), std::abs((z0 * z0 - zr * zr) / (z0 * z0 + zr * zr)), 1e-9);
}

TEST(Abcd, PassiveAndReciprocal) {
    for (double z : {20.0, 49.53, 75.0}) {
        for (double bl = 0.05; bl < 6.0; bl += 0.37) {
            const std::vector<TwoPortABCD> chain{tline_abcd(z, bl), tline_abcd(1.3 * z, 0.7 * bl)};
            const auto s = abcd_to_s(cascade(chain), 50.0);
            EXPECT_NEAR(std::norm(s.s11) + std::norm(s.s21), 1.0, 1e-9);
            EXPECT_TRUE(near(s.s12, s.s21, 1e-12));
        }
    }
}

TEST(Notch, MatchesDirectFormula) {
    const auto r = notch(7.11524e9, 6618.16, 2 * 6618.16);
    const auto grid = notch_grid(r, 10.0, 401);
    const auto resp = notch_s21(r, grid);
    const auto& s21 = resp.trace("s21");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EXPECT_TRUE(near(s21[k], notch_oracle(grid[k], r.dip_frequency(), r.loaded_q, r.coupling_q), 1e-12));
    }
    EXPECT_NEAR(std::abs(notch_s21(r, {r.dip_frequency()}).trace("s21")[0]), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(notch_s21(r, {2 * r.dip_frequency()}).trace("s21")[0]), 1.0, 1e-3);
}

TEST(Notch, QubitStateShift) {
    auto r = notch(7e9, 5000, 5000);
    r.dispersive_shift = -0.2e6;
    const double d0 = r.dip_frequency();
    r.qubit_state = 1;
    EXPECT_NEAR(d0 - r.dip_frequency(), 2 * r.dispersive_shift, 1e-6);
    const auto fit = extract_q_fwhm(notch_s21(r, notch_grid(r)));
    EXPECT_NEAR(fit.resonant_frequency, r.dip_frequency(), 7e9 / 5000 / 100);
}

TEST(Notch, Validation) {
    EXPECT_THROW(notch(7e9, 5000, 4000).validate(), DomainError);
    EXPECT_THROW(notch(-1.0, 5000, 5000).validate(), DomainError);
}

TEST(QExtraction, RoundTripAcrossDecades) {
    for (double q : {1e3, 5.48e3, 6618.16, 3e4, 7.5e5, 1e6}) {
        const auto r = notch(7e9, q, q);
        const auto fit = extract_q_fwhm(notch_s21(r, notch_grid(r)));
        EXPECT_NEAR(fit.quality_factor / q, 1.0, 5e-3) << q;
    }
}

TEST(QExtraction, UndercoupledWidthOracle) {
    // |S21|^2 = 1/2 at 4x^2 = 1 - 2(1 - Ql/Qc)^2.
    const double ql = 8000;
    const double qc = 10000;
    const auto r = notch(6e9, ql, qc);
    const double a = ql / qc;
    const double expected = ql / std::sqrt(1.0 - 2.0 * (1.0 - a) * (1.0 - a));
    const auto fit = extract_q_fwhm(notch_s21(r, notch_grid(r, 10.0, 20001)));
    EXPECT_NEAR(fit.quality_factor / expected, 1.0, 1e-5);
}

TEST(QExtraction, TableBandwidth) {
    const auto r = notch(7.11524e9, 6618.16, 6618.16);
    const auto fit = extract_q_fwhm(notch_s21(r, notch_grid(r)));
    EXPECT_NEAR(fit.bandwidth, 1.0751e6, 0.001e6);
    EXPECT_NEAR(fit.resonant_frequency / fit.bandwidth, fit.quality_factor, 1e-9 * fit.quality_factor);
}

TEST(QExtraction, Failures) {
    FrequencyResponse flat(linear_grid(1e9, 2e9, 101), 50.0);
    flat.add("s21", std::vector<complex>(101, complex(1.0, 0.0)));
    EXPECT_THROW(extract_q_fwhm(flat), ExtractionError);

    const auto shallow = notch(7e9, 1000, 10000);
    EXPECT_THROW(extract_q_fwhm(notch_s21(shallow, notch_grid(shallow))), ExtractionError);

    const auto narrow = notch(7e9, 1000, 1000);
    EXPECT_THROW(extract_q_fwhm(notch_s21(narrow, notch_grid(narrow, 0.3, 101))), ExtractionError);

    const auto grid = linear_grid(6.9e9, 7.1e9, 4001);
    auto twin = notch_s21(notch(6.95e9, 2000, 2000), grid).trace("s21");
    const auto other = notch_s21(notch(7.05e9, 2000, 2000), grid).trace("s21");
    for (std::size_t k = 0; k < twin.size(); ++k) twin[k] *= other[k];
    FrequencyResponse both(grid, 50.0);
    both.add("s21", twin);
    EXPECT_THROW(extract_q_fwhm(both), ExtractionError);
}

TEST(FrequencyResponse, CsvAndValidation) {
    FrequencyResponse r({1.0, 2.0}, 50.0);
    r.add("s11", {complex(0.1, 0.2), complex(0.3, 0.4)});
    r.add("s21", {complex(1.0, 0.0), complex(0.0, -1.0)});
    std::ostringstream out;
    r.write_csv(out);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "freq_hz,s11_re,s11_im,s21_re,s21_im");
    EXPECT_THROW(r.add("s12", {complex(0.0)}), DomainError);
    EXPECT_THROW(FrequencyResponse({2.0, 1.0}, 50.0), DomainError);
    EXPECT_THROW(r.trace("s22"), DomainError);
}

TEST(Matching, ArgminAtLineImpedance) {
    const double z0 = 49.533;
    const auto sweep = match_sweep(z0, 40.0, 60.0, 0.1, {1e9, 20e9}, 4.2956e-3, 6.45);
    EXPECT_EQ(sweep.points.size(), 201u);
    EXPECT_LE(std::abs(sweep.best_z_port - z0), 0.1);
    // Unimodal: falls to the minimum then rises.
    std::size_t best = 0;
    for (std::size_t k = 0; k < sweep.points.size(); ++k) {
        if (sweep.points[k].z_port == sweep.best_z_port) best = k;
    }
    for (std::size_t k = 1; k <= best; ++k) EXPECT_LT(sweep.points[k].worst_s11_db, sweep.points[k - 1].worst_s11_db);
    for (std::size_t k = best + 1; k < sweep.points.size(); ++k) {
        EXPECT_GT(sweep.points[k].worst_s11_db, sweep.points[k - 1].worst_s11_db);
    }
}

TEST(Matching, BandLimits) {
    EXPECT_THROW(worst_case_reflection(50, 50, {0.5e9, 2e9}, 1e-3, 6.45), DomainError);
    EXPECT_THROW(worst_case_reflection(50, 50, {1e9, 25e9}, 1e-3, 6.45), DomainError);
}

TEST(Crosstalk, ZeroWithoutBridgeAndGrowsWithCg) {
    const auto near_side = notch(7.11524e9, 6618.16, 6618.16);
    const auto far_side = notch(7.51364e9, 5782.30, 5782.30);
    EXPECT_EQ(crosstalk_dip(0.0, near_side, far_side), 0.0);
    double prev = 0.0;
    for (double cg : {0.2e-15, 0.5e-15, 1e-15, 2e-15, 4e-15, 8e-15}) {
        const double d = crosstalk_dip(cg, near_side, far_side);
        EXPECT_GT(d, prev) << cg;
        prev = d;
    }
    EXPECT_THROW(crosstalk_dip(-1e-15, near_side, far_side), DomainError);
}

TEST(Crosstalk, FarTransmissionCurve) {
    const auto near_side = notch(7.1e9, 6000, 6000);
    const auto far_side = notch(7.5e9, 6000, 6000);
    const auto grid = linear_grid(7.49e9, 7.51e9, 2001);
    const auto db = crosstalk_far_transmission_db(0.0, near_side, far_side, grid);
    // The far notch shows up as a deep dip in its own line.
    EXPECT_LT(*std::min_element(db.begin(), db.end()), -20.0);
    EXPECT_GT(db.front(), -1.0);
}
