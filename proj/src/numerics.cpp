#include "flipkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "flipkit/constants.hpp"
#include "flipkit/errors.hpp"

namespace flipkit::numerics {

RealInterval::RealInterval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw DomainError(fmt::format("interval [{}, {}] must satisfy lo < hi with finite ends", lo, hi));
    }
}

SymmetricMatrix::SymmetricMatrix(std::size_t order) : order_(order), packed_(order * (order + 1) / 2, 0.0) {
    if (order == 0) throw DomainError("symmetric matrix order must be positive");
}

std::size_t SymmetricMatrix::index(std::size_t i, std::size_t j) const {
    if (i >= order_ || j >= order_) throw DomainError("symmetric matrix index out of range");
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
}

double& SymmetricMatrix::at(std::size_t i, std::size_t j) { return packed_[index(i, j)]; }
double SymmetricMatrix::at(std::size_t i, std::size_t j) const { return packed_[index(i, j)]; }

double SymmetricMatrix::norm() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < order_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = at(i, j);
            sum += (i == j ? 1.0 : 2.0) * v * v;
        }
    }
    return std::sqrt(sum);
}

double agm(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError(fmt::format("agm requires positive finite inputs, got ({}, {})", a, b));
    }
    // Quadratic convergence; 64 iterations is far beyond what any double input needs.
    for (int it = 0; it < 64 && std::abs(a - b) > 1e-15 * a; ++it) {
        const double next_a = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next_a;
    }
    return a;
}

double elliptic_k(double k) {
    if (!(k >= 0.0) || !(k < 1.0)) {
        throw DomainError(fmt::format("elliptic_k requires 0 <= k < 1, got {}", k));
    }
    return constants::pi / (2.0 * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))));
}

EigenSystem eig_sym(const SymmetricMatrix& m) {
    const std::size_t n = m.order();
    std::vector<double> a(n * n);
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 1.0;
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m.at(i, j);
    }
    auto A = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    auto V = [&](std::size_t i, std::size_t j) -> double& { return v[i * n + j]; };

    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                // Rotation angle chosen as the smaller root (stable form, see Golub & Van Loan 8.5).
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = 0.0;
                A(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return A(x, x) < A(y, y); });

    EigenSystem out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t idx : order) {
        out.values.push_back(A(idx, idx));
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = V(k, idx);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

double find_root(const std::function<double(double)>& f, const RealInterval& bracket, double tol) {
    if (!(tol > 0.0)) throw DomainError("find_root tolerance must be positive");
    double lo = bracket.lo();
    double hi = bracket.hi();
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if (!(f_lo * f_hi < 0.0)) {
        throw BracketError(fmt::format("no sign change on [{}, {}]: f(lo)={}, f(hi)={}", lo, hi, f_lo, f_hi));
    }
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;  // interval at machine resolution
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

double integrate(const std::function<double(double)>& f, const RealInterval& interval, int panels) {
    if (panels < 2) throw DomainError("integrate requires at least 2 panels");
    const double h = interval.width() / panels;
    double sum = 0.5 * (f(interval.lo()) + f(interval.hi()));
    for (int i = 1; i < panels; ++i) sum += f(interval.lo() + i * h);
    return sum * h;
}

}  // namespace flipkit::numerics
