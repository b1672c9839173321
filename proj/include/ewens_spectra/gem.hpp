#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/theta.hpp"

namespace ewens {

// Truncated stick-breaking sample: y_j = (prod_{i<j} U_i)(1 - U_j) with
// U_i i.i.d. Beta(theta,1). `residual` is prod_{i<=J} U_i, the mass beyond
// the truncation; the sampler guarantees residual * scale_hint < tail_bound.
struct GemSample {
    std::vector<double> sticks;
    double residual = 1.0;
    std::vector<double> u_trace;
    double theta = 1.0;

    static GemSample from_u_trace(const ThetaParam& th, std::vector<double> us) {
        GemSample g;
        g.theta = th.value();
        g.u_trace = std::move(us);
        double prod = 1.0;
        for (double u : g.u_trace) {
            g.sticks.push_back(prod * (1.0 - u));
            prod *= u;
        }
        g.residual = prod;
        return g;
    }
};

struct PhasedGem {
    GemSample gem;
    std::vector<double> phases; // i.i.d. uniform [0,1), independent of gem
};

// Draw one more stick, shrinking the residual.
template <class Rng>
void extend_gem(GemSample& g, Rng& rng) {
    double u = rng.beta_theta_one(g.theta);
    g.u_trace.push_back(u);
    g.sticks.push_back(g.residual * (1.0 - u));
    g.residual *= u;
}

template <class Rng>
GemSample sample_gem(const ThetaParam& theta, double tail_bound, double scale_hint, Rng& rng,
                     std::size_t hard_cap = 1000000) {
    if (!(tail_bound > 0.0)) throw ConfigInvalid("sample_gem: tail_bound must be > 0");
    if (!(scale_hint > 0.0)) throw ConfigInvalid("sample_gem: scale_hint must be > 0");
    GemSample g;
    g.theta = theta.value();
    do {
        if (g.sticks.size() >= hard_cap)
            throw TruncationOverflow("sample_gem: truncation index exceeded hard cap");
        extend_gem(g, rng);
    } while (g.residual * scale_hint >= tail_bound);
    return g;
}

// Phases are drawn from their own stream so that they stay independent of the
// sticks by construction.
template <class Rng>
PhasedGem attach_phases(GemSample gem, Rng& phase_rng) {
    PhasedGem p;
    p.phases.reserve(gem.sticks.size());
    for (std::size_t j = 0; j < gem.sticks.size(); ++j) p.phases.push_back(phase_rng.uniform01());
    p.gem = std::move(gem);
    return p;
}

} // namespace ewens
