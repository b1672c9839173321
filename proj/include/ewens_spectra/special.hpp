#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>

#include "ewens_spectra/errors.hpp"

namespace ewens {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Standard normal CDF via erfc; absolute error well below 1e-12.
inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Inverse standard normal CDF. Acklam's rational approximation refined by
// one Halley step against erfc, good to ~1e-14 over (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * kPi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

namespace detail {

// Regularized lower incomplete gamma P(a,x) by series.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by modified Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

// Regularized upper incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_pvalue(double statistic, int df) {
    return gamma_q(0.5 * df, 0.5 * statistic);
}

// Adaptive Simpson quadrature; plain recursive bisection with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 48) {
    auto simpson = [&](double lo, double hi, double flo, double fmid, double fhi) {
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    };
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
            double m = 0.5 * (lo + hi);
            double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
            double flm = f(lm), frm = f(rm);
            double left = simpson(lo, m, flo, flm, fmid);
            double right = simpson(m, hi, fmid, frm, fhi);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, m, flo, flm, fmid, left, depth - 1) +
                   rec(m, hi, fmid, frm, fhi, right, depth - 1);
        };
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), max_depth);
}

// FNV-1a, used to hash statistic descriptors into RNG stream keys.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Named irrational inputs are expanded from 30+ digit decimal literals so that
// runs are reproducible; raw decimals are also accepted.
inline long double parse_real_keyword(std::string_view s) {
    if (s == "sqrt2") return 1.41421356237309504880168872420969808L;
    if (s == "golden") return 1.61803398874989484820458683436563812L;
    if (s == "pi") return 3.14159265358979323846264338327950288L;
    char* end = nullptr;
    std::string buf(s);
    long double v = std::strtold(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0')
        throw ConfigInvalid("cannot parse real value: " + buf);
    return v;
}

} // namespace ewens
