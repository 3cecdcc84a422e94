#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace flipkit::numerics {

/// Closed interval [lo, hi] with lo < hi, both finite.
class RealInterval {
public:
    RealInterval(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double width() const noexcept { return hi_ - lo_; }
    bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

private:
    double lo_;
    double hi_;
};

/// Dense real symmetric matrix; only the lower triangle is stored, so
/// at(i, j) and at(j, i) always refer to the same entry.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t order);

    std::size_t order() const noexcept { return order_; }
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;

    // Frobenius norm.
    double norm() const;

private:
    std::size_t index(std::size_t i, std::size_t j) const;

    std::size_t order_;
    std::vector<double> packed_;
};

struct EigenSystem {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k], unit norm
};

/// Arithmetic-geometric mean of two positive numbers.
double agm(double a, double b);

/// Complete elliptic integral of the first kind K(k), modulus convention, 0 <= k < 1.
double elliptic_k(double k);

/// Eigen-decomposition by cyclic Jacobi rotations.
EigenSystem eig_sym(const SymmetricMatrix& m);

/// Bisection root of f on a sign-changing bracket; stops when the bracket is narrower than tol.
double find_root(const std::function<double(double)>& f, const RealInterval& bracket, double tol);

/// Composite trapezoidal rule with n panels. Error is O(1/n^2) for smooth
/// integrands (spectral for smooth periodic ones, e.g. the K(k) integrand).
double integrate(const std::function<double(double)>& f, const RealInterval& interval, int panels);

}  // namespace flipkit::numerics
