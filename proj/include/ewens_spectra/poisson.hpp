#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/gem.hpp"
#include "ewens_spectra/special.hpp"
#include "ewens_spectra/theta.hpp"

namespace ewens {

// Points of the Poisson process with intensity theta/x, restricted to the
// window (epsilon, x_max) and labeled
//   0 < ... < X_2 < X_1 < 1 <= X_0 < X_{-1} < ... .
// `inner` holds X_1 > X_2 > ... (points below 1), `outer` holds
// X_0 < X_{-1} < ... (points at or above 1).
struct PoissonPointSample {
    std::vector<double> inner;
    std::vector<double> outer;
    double epsilon = 0.0;
    double x_max = 0.0;
    double theta = 1.0;
};

// Spacing sets of the continuous Feller coupling. v_set lists
// 1-X_1, X_1-X_2, ... in order; w_set lists every available spacing
// Y_k = X_{k-1} - X_k that is below 1 (window-truncated at both ends).
struct CoupledSets {
    std::vector<double> v_set;
    std::vector<double> w_set;
    // spacings between consecutive outer points (k <= 0), any size
    std::vector<double> outer_spacings;
    // Y_1 = X_0 - X_1 when both endpoints are present
    bool has_bridge = false;
    double bridge = 0.0;
};

// The log map sends the process to a homogeneous rate-theta process on the
// line, so both sides of x=1 are exponential random walks: points below 1
// are exp(-T_i) and points at or above 1 are exp(S_i) with i.i.d. Exp(theta)
// gaps. Exact in law, no rejection.
template <class Rng>
PoissonPointSample sample_scale_invariant_poisson(const ThetaParam& theta, double epsilon,
                                                  double x_max, Rng& rng) {
    if (!(epsilon > 0.0 && epsilon < 1.0 && x_max > 1.0))
        throw InvalidWindow("sample_scale_invariant_poisson: need 0 < epsilon < 1 < x_max");
    PoissonPointSample s;
    s.epsilon = epsilon;
    s.x_max = x_max;
    s.theta = theta.value();
    const double th = theta.value();
    const double t_lim = std::log(1.0 / epsilon);
    double t = rng.exponential(th);
    while (t < t_lim) {
        s.inner.push_back(std::exp(-t));
        t += rng.exponential(th);
    }
    const double s_lim = std::log(x_max);
    double u = rng.exponential(th);
    while (u < s_lim) {
        s.outer.push_back(std::exp(u));
        u += rng.exponential(th);
    }
    return s;
}

// Window defaults carrying an explicit truncation certificate: the missed
// below-epsilon mass is theta*epsilon in expectation, the missed large
// spacings integrate to at most theta^2/x_max.
inline std::pair<double, double> window_defaults(const ThetaParam& theta, double tail_bound,
                                                 double counting_scale) {
    double eps = tail_bound / (theta.value() * counting_scale);
    double xmax = theta.value() * theta.value() / tail_bound;
    return {std::min(eps, 0.5), std::max(xmax, 2.0)};
}

inline CoupledSets build_coupled_sets(const PoissonPointSample& pts) {
    CoupledSets cs;
    if (!pts.inner.empty()) {
        cs.v_set.push_back(1.0 - pts.inner.front());
        for (std::size_t i = 0; i + 1 < pts.inner.size(); ++i)
            cs.v_set.push_back(pts.inner[i] - pts.inner[i + 1]);
    }
    // Y_k for k >= 2: spacings between consecutive inner points
    for (std::size_t i = 0; i + 1 < pts.inner.size(); ++i)
        cs.w_set.push_back(pts.inner[i] - pts.inner[i + 1]);
    // Y_1 = X_0 - X_1
    if (!pts.inner.empty() && !pts.outer.empty()) {
        cs.has_bridge = true;
        cs.bridge = pts.outer.front() - pts.inner.front();
        if (cs.bridge < 1.0) cs.w_set.push_back(cs.bridge);
    }
    // Y_k for k <= 0: spacings between consecutive outer points
    for (std::size_t i = 0; i + 1 < pts.outer.size(); ++i) {
        double y = pts.outer[i + 1] - pts.outer[i];
        cs.outer_spacings.push_back(y);
        if (y < 1.0) cs.w_set.push_back(y);
    }
    return cs;
}

// Multiset symmetric difference on exact double values.
inline std::vector<double> symmetric_difference(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            out.push_back(a[i++]);
        } else {
            out.push_back(b[j++]);
        }
    }
    for (; i < a.size(); ++i) out.push_back(a[i]);
    for (; j < b.size(); ++j) out.push_back(b[j]);
    return out;
}

// The spacing sequence below X_1 is the stick sequence in law; the residual
// is the smallest retained point.
inline GemSample gem_from_poisson(const PoissonPointSample& pts) {
    GemSample g;
    g.theta = pts.theta;
    if (pts.inner.empty()) return g;
    g.sticks.push_back(1.0 - pts.inner.front());
    for (std::size_t i = 0; i + 1 < pts.inner.size(); ++i)
        g.sticks.push_back(pts.inner[i] - pts.inner[i + 1]);
    g.residual = pts.inner.back();
    return g;
}

// Expected number of sub-unit spacings among the outer labels,
// integral_1^inf (1 - (s/(s+1))^theta) * theta/s ds, evaluated by quadrature
// after the substitution s = 1/u turns it into a smooth integral on [0,1].
// Used as the independent oracle for the coupling experiments (equals log 2
// at theta = 1).
inline double expected_outer_subunit_spacings(double theta) {
    auto f = [theta](double u) {
        if (u == 0.0) return theta * theta;
        return (1.0 - std::pow(1.0 / (1.0 + u), theta)) * theta / u;
    };
    return adaptive_simpson(f, 0.0, 1.0, 1e-13);
}

} // namespace ewens
