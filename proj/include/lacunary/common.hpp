// Shared numeric plumbing: error types, compensated summation, quadrature nodes.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lacunary {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEulerGamma = 0.577215664901532860606512090082402431;

// Input outside an operation's documented domain (maps to CLI exit code 2).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested size exceeds the desk-scale caps (CLI exit code 4).
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An exact identity failed beyond round-off (CLI exit code 3).
struct IdentityFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two evaluation routes disagreed, or an iteration did not converge.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Neumaier-compensated accumulator. Deterministic for a fixed summation order.
template <class T>
class KahanSum {
public:
    void add(T x) {
        T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    KahanSum& operator+=(T x) {
        add(x);
        return *this;
    }
    T value() const { return sum_ + comp_; }

private:
    T sum_{};
    T comp_{};
};

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n);

// Integrates f over [a, b] with `panels` equal panels of an n-point rule.
template <class F>
auto integrate_gl(F&& f, double a, double b, int panels, int n = 20) -> decltype(f(a)) {
    const auto& gl = gauss_legendre(n);
    using R = decltype(f(a));
    R total{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        R part{};
        for (int i = 0; i < n; ++i) part += gl.w[i] * f(mid + 0.5 * h * gl.x[i]);
        total += part * (0.5 * h);
    }
    return total;
}

// Bernoulli numbers B_{2k} for k = 1..count.
const std::vector<double>& bernoulli_even();

std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);

}  // namespace lacunary
