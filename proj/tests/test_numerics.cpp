#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flipkit/errors.hpp"
#include "flipkit/numerics.hpp"

using namespace flipkit;
using namespace flipkit::numerics;

namespace {

const double kPi = std::acos(-1.0);

// Plain recurrence, iterated a fixed number of times.
double agm_by_hand(double a, double b) {
    for (int i = 0; i < 40; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return a;
}

// Simpson's rule on the Legendre form, independent of integrate().
double k_by_simpson(double k) {
    const int n = 20000;
    const double h = 0.5 * kPi / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t));
    }
    return sum * h / 3.0;
}

// Determinant of (A - x I) by Gaussian elimination.
double char_poly(const std::vector<std::vector<double>>& a, double x) {
    auto m = a;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= x;
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
        }
        if (m[p][c] == 0.0) return 0.0;
        if (p != c) {
            std::swap(m[p], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

SymmetricMatrix random_symmetric(std::size_t n, unsigned seed, std::vector<std::vector<double>>* dense = nullptr) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SymmetricMatrix m(n);
    if (dense) dense->assign(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            m.at(i, j) = u(rng);
            if (dense) (*dense)[i][j] = (*dense)[j][i] = m.at(i, j);
        }
    }
    return m;
}

}  // namespace

TEST(Agm, FixedPoints) {
    EXPECT_DOUBLE_EQ(agm(1.0, 1.0), 1.0);
    for (double x : {1e-3, 0.7, 42.0}) EXPECT_DOUBLE_EQ(agm(x, x), x);
}

TEST(Agm, MatchesHandIteration) {
    EXPECT_NEAR(agm(1.0, 0.46271), agm_by_hand(1.0, 0.46271), 1e-14);
    EXPECT_NEAR(agm(1.0, 0.46271), 0.705558, 1e-5);
}

TEST(Agm, SymmetricAndBounded) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(1e-3, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double a = u(rng);
        const double b = u(rng);
        const double m = agm(a, b);
        EXPECT_NEAR(m, agm(b, a), 1e-14 * m);
        EXPECT_GE(m, std::min(a, b));
        EXPECT_LE(m, std::max(a, b));
    }
}

TEST(Agm, RejectsNonPositive) {
    EXPECT_THROW(agm(0.0, 1.0), DomainError);
    EXPECT_THROW(agm(1.0, -2.0), DomainError);
}

TEST(EllipticK, ZeroIsHalfPi) { EXPECT_EQ(elliptic_k(0.0), kPi / 2); }

TEST(EllipticK, MatchesQuadratureOracle) {
    EXPECT_NEAR(elliptic_k(0.46271), k_by_simpson(0.46271), 1e-10);
    EXPECT_NEAR(elliptic_k(0.46271), 1.6668, 1e-3);
    EXPECT_NEAR(elliptic_k(0.88652), 2.2263, 1e-3);
    for (double k = 0.0; k <= 0.99; k += 0.03) EXPECT_NEAR(elliptic_k(k), k_by_simpson(k), 1e-6) << k;
}

TEST(EllipticK, StrictlyIncreasing) {
    double prev = elliptic_k(0.0);
    for (double k = 0.01; k < 1.0; k += 0.01) {
        const double v = elliptic_k(k);
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(EllipticK, DomainErrors) {
    EXPECT_THROW(elliptic_k(1.0), DomainError);
    EXPECT_THROW(elliptic_k(-0.1), DomainError);
    EXPECT_THROW(elliptic_k(std::nan("")), DomainError);
}

TEST(EigSym, Identity) {
    SymmetricMatrix m(3);
    for (std::size_t i = 0; i < 3; ++i) m.at(i, i) = 1.0;
    const auto e = eig_sym(m);
    for (double v : e.values) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(EigSym, OffDiagonalPair) {
    SymmetricMatrix m(2);
    m.at(0, 1) = 0.3;
    const auto e = eig_sym(m);
    EXPECT_NEAR(e.values[0], -0.3, 1e-15);
    EXPECT_NEAR(e.values[1], 0.3, 1e-15);
}

TEST(EigSym, CharacteristicPolynomialOracle) {
    std::vector<std::vector<double>> dense;
    const auto m = random_symmetric(5, 11, &dense);
    const auto e = eig_sym(m);
    // Gershgorin bound brackets every root; bisect det(A - xI) around each eigenvalue.
    for (double lambda : e.values) {
        double lo = lambda - 1e-4;
        double hi = lambda + 1e-4;
        double flo = char_poly(dense, lo);
        ASSERT_LT(flo * char_poly(dense, hi), 0.0);
        for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = char_poly(dense, mid);
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        EXPECT_NEAR(lambda, 0.5 * (lo + hi), 1e-8);
    }
}

TEST(EigSym, TraceAndOrthonormality) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        std::vector<std::vector<double>> dense;
        const std::size_t n = 4 + seed * 3;
        const auto m = random_symmetric(n, seed, &dense);
        const auto e = eig_sym(m);
        double trace = 0.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) trace += dense[i][i];
        for (double v : e.values) sum += v;
        EXPECT_NEAR(sum, trace, 1e-10 * std::max(1.0, std::abs(trace)));
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += e.vectors[a][i] * e.vectors[b][i];
                EXPECT_NEAR(dot, a == b ? 1.0 : 0.0, 1e-10);
            }
            // A v = lambda v
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0;
                for (std::size_t k = 0; k < n; ++k) av += dense[i][k] * e.vectors[a][k];
                EXPECT_NEAR(av, e.values[a] * e.vectors[a][i], 1e-10);
            }
        }
        for (std::size_t k = 1; k < n; ++k) EXPECT_LE(e.values[k - 1], e.values[k]);
    }
}

TEST(FindRoot, Examples) {
    EXPECT_NEAR(find_root([](double x) { return x - 2.0; }, {0.0, 5.0}, 1e-12), 2.0, 1e-12);
    EXPECT_NEAR(find_root([](double x) { return x * x - 2.0; }, {1.0, 2.0}, 1e-12), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(find_root([](double x) { return std::cos(x); }, {1.0, 2.0}, 1e-12), kPi / 2, 1e-12);
}

TEST(FindRoot, NoSignChange) {
    EXPECT_THROW(find_root([](double x) { return x * x + 1.0; }, {-1.0, 1.0}, 1e-9), BracketError);
}

TEST(RealInterval, Invalid) {
    EXPECT_THROW(RealInterval(1.0, 1.0), DomainError);
    EXPECT_THROW(RealInterval(0.0, INFINITY), DomainError);
}

TEST(Integrate, Examples) {
    EXPECT_DOUBLE_EQ(integrate([](double) { return 1.0; }, {0.0, 1.0}, 8), 1.0);
    EXPECT_NEAR(integrate([](double x) { return x; }, {0.0, 1.0}, 8), 0.5, 1e-15);
    const double k = integrate([](double t) { return 1.0 / std::sqrt(1.0 - 0.25 * std::sin(t) * std::sin(t)); },
                               {0.0, kPi / 2}, 64);
    EXPECT_NEAR(k, elliptic_k(0.5), 1e-12);
}

TEST(Integrate, SecondOrderConvergence) {
    auto f = [](double x) { return std::exp(x); };
    const double exact = std::exp(1.0) - 1.0;
    const double e1 = std::abs(integrate(f, {0.0, 1.0}, 16) - exact);
    const double e2 = std::abs(integrate(f, {0.0, 1.0}, 32) - exact);
    EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}
