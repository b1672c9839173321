#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/ewens.hpp"
#include "ewens_spectra/gem.hpp"
#include "ewens_spectra/summation.hpp"

namespace ewens {

// Half-open window (a, a+b]; ties at the left endpoint are excluded.
struct Interval {
    double a = 0.0;
    double b = 1.0;
};

struct CountResult {
    double value = 0.0;
    double truncation_bias_bound = 0.0;
};

namespace detail {

// floor(t * l / n) for the lattice counts. When t is a dyadic rational
// (covers every integer and half-integer window used in practice) the value
// is computed in exact integer arithmetic; otherwise long double with a snap
// at integer boundaries, matching the exact-rational semantics of the count.
inline std::int64_t floor_scaled(double t, std::uint64_t l, std::uint64_t n) {
    for (int shift = 0; shift <= 20; ++shift) {
        double scaled = std::ldexp(t, shift);
        if (scaled == std::floor(scaled) && std::abs(scaled) < 9e15) {
            __int128 num = static_cast<__int128>(static_cast<std::int64_t>(scaled)) *
                           static_cast<__int128>(l);
            __int128 den = static_cast<__int128>(n) << shift;
            __int128 q = num / den;
            if (num < 0 && num % den != 0) --q; // toward -inf
            return static_cast<std::int64_t>(q);
        }
    }
    long double v = static_cast<long double>(t) * static_cast<long double>(l) /
                    static_cast<long double>(n);
    long double r = std::nearbyint(v);
    if (std::fabs(v - r) < 1e-9L) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(v));
}

inline double frac(double x) { return x - std::floor(x); }

} // namespace detail

// Number of lattice points k / (l_j/n), k integer, in (a, a+b], summed over
// cycles: sum_j floor((a+b) l_j / n) - floor(a l_j / n). Exact.
inline CountResult count_eigenangles(const CycleLengths& cycles, const Interval& w) {
    if (!(w.a >= 0.0) || !(w.b > 0.0))
        throw InvalidWindow("count_eigenangles: need a >= 0 and b > 0");
    std::int64_t total = 0;
    for (auto l : cycles.lengths)
        total += detail::floor_scaled(w.a + w.b, l, cycles.n) -
                 detail::floor_scaled(w.a, l, cycles.n);
    return {static_cast<double>(total), 0.0};
}

// Phased variant: points sit at (k + phi_j) / y_j, so the per-cycle count is
// floor((a+b) y_j - phi_j) - floor(a y_j - phi_j).
inline CountResult count_eigenangles_phased(const CycleLengths& cycles,
                                            const std::vector<double>& phases,
                                            const Interval& w) {
    if (!(w.a >= 0.0) || !(w.b > 0.0))
        throw InvalidWindow("count_eigenangles_phased: need a >= 0 and b > 0");
    if (phases.size() < cycles.lengths.size())
        throw ConfigInvalid("count_eigenangles_phased: one phase per cycle required");
    std::int64_t total = 0;
    const double n = static_cast<double>(cycles.n);
    for (std::size_t j = 0; j < cycles.lengths.size(); ++j) {
        double y = static_cast<double>(cycles.lengths[j]) / n;
        total += static_cast<std::int64_t>(std::floor((w.a + w.b) * y - phases[j])) -
                 static_cast<std::int64_t>(std::floor(w.a * y - phases[j]));
    }
    return {static_cast<double>(total), 0.0};
}

// Limiting count on (a, a+b], a > 0:
//   X(a,a+b) = b - sum_j ({(a+b) y_j} - {a y_j}).
// Beyond the truncation index every summand is exactly b*y_j once
// (a+b)*residual < 1, so the tail is added in closed form as b*residual and
// the truncation bias is zero in that regime.
inline CountResult count_limit(const GemSample& gem, double a, double b) {
    if (!(a > 0.0)) throw InvalidWindow("count_limit: the window must not touch 0 (a > 0)");
    if (!(b > 0.0)) throw InvalidWindow("count_limit: need b > 0");
    NeumaierSum s;
    const double t = a + b;
    for (double y : gem.sticks) s.add(detail::frac(t * y) - detail::frac(a * y));
    CountResult r;
    r.value = b - s.value() - b * gem.residual;
    r.truncation_bias_bound = (t * gem.residual < 1.0) ? 0.0 : t * gem.residual;
    return r;
}

// Phased limiting count on [0, A]:
//   X~(A) = A + sum_j (1{phi_j <= {A y_j}} - {A y_j}),
// the tail beyond the truncation dropped with mean bias at most A*residual.
inline CountResult count_limit_phased(const PhasedGem& phased, double A) {
    if (!(A > 0.0)) throw InvalidWindow("count_limit_phased: need A > 0");
    NeumaierSum s;
    for (std::size_t j = 0; j < phased.gem.sticks.size(); ++j) {
        double p = detail::frac(A * phased.gem.sticks[j]);
        s.add((phased.phases[j] <= p ? 1.0 : 0.0) - p);
    }
    CountResult r;
    r.value = A + s.value();
    r.truncation_bias_bound = A * phased.gem.residual;
    return r;
}

// Translation experiment alias: the count on (s, s+t].
inline CountResult count_shifted(const GemSample& gem, double s, double t) {
    return count_limit(gem, s, t);
}

// Sum of the conditional Bernoulli variances of the phased count,
// sum_j p_j (1-p_j) / log A with p_j = {A y_j}. Converges in probability to
// theta/6; the dropped tail contributes at most A*residual / log A.
inline double variance_rate_statistic(const GemSample& gem, double A) {
    if (!(A > 1.0)) throw InvalidWindow("variance_rate_statistic: need A > 1");
    NeumaierSum s;
    for (double y : gem.sticks) {
        double p = detail::frac(A * y);
        s.add(p * (1.0 - p));
    }
    return s.value() / std::log(A);
}

} // namespace ewens
