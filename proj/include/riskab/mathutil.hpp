#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>

namespace riskab {

inline double sqr(double x) { return x * x; }

inline double l2_norm(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// Regularized upper incomplete gamma Q(a, x) for a a positive multiple of 1/2.
// Built by the upward recurrence Q(a+1, x) = Q(a, x) + x^a e^-x / Gamma(a+1)
// from Q(1/2, x) = erfc(sqrt(x)) or Q(1, x) = e^-x. The extra term is
// accumulated in log space to avoid overflow for large a.
inline double gamma_q_half_integer(double a, double x) {
    if (x <= 0.0) return 1.0;
    double q;
    double base;  // the a-value q currently refers to
    bool integral = std::abs(a - std::round(a)) < 1e-12;
    if (integral) {
        q = std::exp(-x);
        base = 1.0;
    } else {
        q = std::erfc(std::sqrt(x));
        base = 0.5;
    }
    while (base + 0.5 < a + 1e-9) {
        q += std::exp(base * std::log(x) - x - std::lgamma(base + 1.0));
        base += 1.0;
    }
    return q < 0.0 ? 0.0 : (q > 1.0 ? 1.0 : q);
}

namespace detail {

template <class F>
double adaptive_simpson_rec(F& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

}  // namespace riskab
