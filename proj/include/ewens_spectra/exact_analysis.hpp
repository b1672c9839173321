#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/piecewise.hpp"
#include "ewens_spectra/special.hpp"
#include "ewens_spectra/summation.hpp"
#include "ewens_spectra/theta.hpp"

namespace ewens {

// ---------------------------------------------------------------------------
// Cesaro limits of fractional-part averages. These drive the log-scale mean
// and variance coefficients of the counting statistics:
//   c1 = lim (1/n) sum_j ({j beta} - {j alpha})
//   c2 = lim (1/n) sum_j ({j beta} - {j alpha})^2
//   ell = lim (1/n) sum_j {j kappa}(1 - {j kappa})
// ---------------------------------------------------------------------------

struct CesaroResult {
    double value = 0.0;
    double tail_estimate = 0.0; // |avg(n) - avg(n/2)|, the dyadic certificate
    bool converged = false;
    std::uint64_t n_terms = 0;
};

namespace detail {

inline long double fracl(long double x) { return x - std::floor(x); }

template <class Term>
CesaroResult cesaro_average(Term term, std::uint64_t n_terms, double tol) {
    if (n_terms < 2) throw ConfigInvalid("cesaro: need n_terms >= 2");
    long double sum = 0.0L;
    long double half_avg = 0.0L;
    const std::uint64_t half = n_terms / 2;
    for (std::uint64_t j = 1; j <= n_terms; ++j) {
        sum += term(j);
        if (j == half) half_avg = sum / static_cast<long double>(half);
    }
    CesaroResult r;
    r.n_terms = n_terms;
    r.value = static_cast<double>(sum / static_cast<long double>(n_terms));
    r.tail_estimate = static_cast<double>(std::fabs(sum / n_terms - half_avg));
    r.converged = r.tail_estimate < tol;
    return r;
}

} // namespace detail

inline CesaroResult cesaro_c1(long double alpha, long double beta, std::uint64_t n_terms,
                              double tol = 1e-3) {
    return detail::cesaro_average(
        [=](std::uint64_t j) {
            return detail::fracl(j * beta) - detail::fracl(j * alpha);
        },
        n_terms, tol);
}

inline CesaroResult cesaro_c2(long double alpha, long double beta, std::uint64_t n_terms,
                              double tol = 1e-3) {
    return detail::cesaro_average(
        [=](std::uint64_t j) {
            long double d = detail::fracl(j * beta) - detail::fracl(j * alpha);
            return d * d;
        },
        n_terms, tol);
}

inline CesaroResult cesaro_ell(long double kappa, std::uint64_t n_terms, double tol = 1e-3) {
    return detail::cesaro_average(
        [=](std::uint64_t j) {
            long double f = detail::fracl(j * kappa);
            return f * (1.0L - f);
        },
        n_terms, tol);
}

// Closed form of c2 for beta = (r/s) alpha with alpha irrational and
// gcd(r,s) = 1: c2 = (1/6)(1 - 1/(rs)). The companion *_checked variant also
// runs the Cesaro route so callers can see both numbers.
inline double rational_c2(std::uint64_t r, std::uint64_t s) {
    if (r == 0 || s == 0) throw ConfigInvalid("rational_c2: r, s must be positive");
    if (std::gcd(r, s) != 1) throw NotCoprime("rational_c2: gcd(r,s) must be 1");
    return (1.0 - 1.0 / static_cast<double>(r * s)) / 6.0;
}

struct RationalC2Check {
    double closed_form = 0.0;
    double cesaro = 0.0;
    double abs_diff = 0.0;
};

inline RationalC2Check rational_c2_checked(std::uint64_t r, std::uint64_t s, long double alpha,
                                           std::uint64_t n_terms = 10000000) {
    RationalC2Check out;
    out.closed_form = rational_c2(r, s);
    long double beta = alpha * static_cast<long double>(r) / static_cast<long double>(s);
    out.cesaro = cesaro_c2(alpha, beta, n_terms).value;
    out.abs_diff = std::abs(out.cesaro - out.closed_form);
    return out;
}

// ---------------------------------------------------------------------------
// Fourier expansion of the second Bernoulli identity:
//   {x}(1-{x}) = 1/6 - (1/(2 pi^2)) sum_{k != 0} e^{2 pi i k x} / k^2.
// Partial sum up to k_max, real form.
// ---------------------------------------------------------------------------
inline double fourier_b2(double x, std::uint64_t k_max) {
    if (k_max < 1) throw ConfigInvalid("fourier_b2: k_max >= 1");
    NeumaierSum s;
    for (std::uint64_t k = 1; k <= k_max; ++k)
        s.add(std::cos(2.0 * kPi * k * x) / (static_cast<double>(k) * static_cast<double>(k)));
    return 1.0 / 6.0 - s.value() / (kPi * kPi);
}

// ---------------------------------------------------------------------------
// Closed forms of the log-singular integrals.
// ---------------------------------------------------------------------------

// integral_0^1 {n x}/x dx = 1 + sum_{k=1}^{n-1} (1 - k log(1+1/k))
//                         = (1/2) log n + log(2 pi)/2 + o(1).
inline double integral_frac_over_x(std::uint64_t n) {
    if (n < 1) throw ConfigInvalid("integral_frac_over_x: n >= 1");
    NeumaierSum s;
    s.add(1.0);
    for (std::uint64_t k = 1; k < n; ++k)
        s.add(1.0 - static_cast<double>(k) * std::log1p(1.0 / static_cast<double>(k)));
    return s.value();
}

// log(n!) by direct log summation; Stirling would pollute the (log n)/(12n)
// remainder scale probed by the tests.
inline double log_factorial(std::uint64_t n) {
    NeumaierSum s;
    for (std::uint64_t k = 2; k <= n; ++k) s.add(std::log(static_cast<double>(k)));
    return s.value();
}

// integral_0^1 {n x} log x dx
//   = -(1/2) log n + log(n!)/(2n) - 1/(4n)
//     - (1/(2n)) sum_{k=1}^{n-1} (1/2 - k + k^2 log(1+1/k))
//   = -1/2 + (log n)/(12 n) + O(1/n).
inline double integral_frac_logx(std::uint64_t n) {
    if (n < 1) throw ConfigInvalid("integral_frac_logx: n >= 1");
    const double nd = static_cast<double>(n);
    NeumaierSum s;
    for (std::uint64_t k = 1; k < n; ++k) {
        double kd = static_cast<double>(k);
        s.add(0.5 - kd + kd * kd * std::log1p(1.0 / kd));
    }
    return -0.5 * std::log(nd) + log_factorial(n) / (2.0 * nd) - 1.0 / (4.0 * nd) -
           s.value() / (2.0 * nd);
}

// sum_{k=1}^{n-1} (2 {sign * l k / n} - 1) log(k/n), fractional parts in exact
// integer arithmetic. Grows like +-[l/2 + 2 sum_{m<l} (m/l) log(m/l)] n
// -+ (1/2) log n + O(1).
inline double sum_frac_log(std::uint64_t l, std::uint64_t n, int sign) {
    if (l < 1 || n < 2) throw ConfigInvalid("sum_frac_log: need l >= 1, n >= 2");
    if (sign != 1 && sign != -1) throw ConfigInvalid("sum_frac_log: sign must be +-1");
    NeumaierSum s;
    const double nd = static_cast<double>(n);
    for (std::uint64_t k = 1; k < n; ++k) {
        std::uint64_t rem = (l * k) % n;
        double f = (sign > 0) ? static_cast<double>(rem) / nd
                              : (rem == 0 ? 0.0 : static_cast<double>(n - rem) / nd);
        s.add((2.0 * f - 1.0) * std::log(static_cast<double>(k) / nd));
    }
    return s.value();
}

// Leading linear coefficient of sum_frac_log: l/2 + 2 sum_{m<l} (m/l) log(m/l).
inline double sum_frac_log_leading(std::uint64_t l) {
    NeumaierSum s;
    for (std::uint64_t m = 1; m < l; ++m) {
        double x = static_cast<double>(m) / static_cast<double>(l);
        s.add(x * std::log(x));
    }
    return static_cast<double>(l) / 2.0 + 2.0 * s.value();
}

// integral_0^1 {p x} log x dx = p/4 + sum_{j<p} (j/p) log(j/p) - 1/2, exact.
inline double integral_frac_logx_exact(std::uint64_t p) {
    NeumaierSum s;
    for (std::uint64_t j = 1; j < p; ++j) {
        double x = static_cast<double>(j) / static_cast<double>(p);
        s.add(x * std::log(x));
    }
    return static_cast<double>(p) / 4.0 + s.value() - 0.5;
}

// integral_0^1 ({p x} - {q x})^2 / x dx in closed form:
//   -2(p-q) integral ({px}-{qx}) log x dx
//   - sum_{k<p} (2{qk/p}-1) log(k/p) - sum_{j<q} (2{pj/q}-1) log(j/q)
//   - 2 sum_{m<gcd(p,q)} log(m/gcd(p,q)).
inline double variance_integral_exact(std::uint64_t p, std::uint64_t q) {
    if (p < 1 || q < 1) throw ConfigInvalid("variance_integral_exact: p, q >= 1");
    const double dpq = static_cast<double>(p) - static_cast<double>(q);
    double v = -2.0 * dpq * (integral_frac_logx_exact(p) - integral_frac_logx_exact(q));
    if (p >= 2) v -= sum_frac_log(q, p, +1);
    if (q >= 2) v -= sum_frac_log(p, q, +1);
    std::uint64_t g = std::gcd(p, q);
    NeumaierSum s;
    for (std::uint64_t m = 1; m < g; ++m)
        s.add(std::log(static_cast<double>(m) / static_cast<double>(g)));
    v -= 2.0 * s.value();
    return v;
}

// ---------------------------------------------------------------------------
// Campbell moments of the linear statistic T = sum_{x in W} f_{a,b}(x) over
// the scale-invariant process: E(T) = theta int f/x, V(T) = theta int f^2/x,
// with f_{a,b}(x) = {(a+b)x} - {a x} assembled exactly as a piecewise
// polynomial on the merged k/a, k/(a+b) grid.
// ---------------------------------------------------------------------------

inline PiecewisePoly window_indicator_transform(double a, double b) {
    double merge_tol = 1e-15 * (a + b);
    return PiecewisePoly::frac_part(a + b).subtract(PiecewisePoly::frac_part(a), merge_tol);
}

struct CampbellMoments {
    double mean = 0.0;
    double variance = 0.0;
};

inline CampbellMoments campbell_moments(double a, double b, const ThetaParam& theta) {
    if (!(a > 0.0 && b > 0.0)) throw InvalidWindow("campbell_moments: need a, b > 0");
    PiecewisePoly f = window_indicator_transform(a, b);
    CampbellMoments m;
    m.mean = theta.value() * f.integral_over_x();
    m.variance = theta.value() * f.square().integral_over_x();
    return m;
}

// Residuals of the log-scaling law int_0^1 f({tx})/x dx = log(t) int f + O(1)
// over a grid of t values. Bounded residuals are the checkable content.
inline std::vector<double> log_scaling_residuals(const PiecewisePoly& f,
                                                 const std::vector<double>& t_grid) {
    const double mass = f.integral();
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid)
        out.push_back(f.transform_integral_over_x(t) - std::log(t) * mass);
    return out;
}

} // namespace ewens
