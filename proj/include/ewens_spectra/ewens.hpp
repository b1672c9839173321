#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/gem.hpp"
#include "ewens_spectra/theta.hpp"

namespace ewens {

// Cycle lengths of a permutation in order of appearance of the cycles
// (equivalently, increasing order of their smallest elements under the
// grow-by-one construction). Lengths are exact integers; division happens
// only in normalize().
struct CycleLengths {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> lengths;

    bool valid() const {
        std::uint64_t s = 0;
        for (auto l : lengths) {
            if (l == 0) return false;
            s += l;
        }
        return s == n && n >= 1;
    }
};

inline std::string to_json(const CycleLengths& c) {
    std::string s = "[";
    for (std::size_t j = 0; j < c.lengths.size(); ++j) {
        if (j) s += ",";
        s += std::to_string(c.lengths[j]);
    }
    return s + "]";
}

struct NormalizedCycles {
    std::vector<double> values;
};

// One growth step of the Chinese-restaurant construction: element n+1 starts
// a new cycle with probability theta/(n+theta), otherwise joins cycle j with
// probability lengths[j]/(n+theta). Marginals stay Ewens(theta) at every n.
template <class Rng>
CycleLengths crp_grow(const CycleLengths& state, const ThetaParam& theta, Rng& rng) {
    const double n = static_cast<double>(state.n);
    const double th = theta.value();
    double x = rng.uniform01() * (n + th);
    CycleLengths out = state;
    out.n = state.n + 1;
    if (x < th) {
        out.lengths.push_back(1);
        return out;
    }
    x -= th;
    for (std::size_t j = 0; j < out.lengths.size(); ++j) {
        double l = static_cast<double>(out.lengths[j]);
        if (x < l) {
            out.lengths[j] += 1;
            return out;
        }
        x -= l;
    }
    // floating slack at the right edge: join the last cycle
    out.lengths.back() += 1;
    return out;
}

template <class Rng>
std::vector<CycleLengths> sample_virtual(std::uint64_t n_max, const ThetaParam& theta, Rng& rng) {
    if (n_max < 1) throw ConfigInvalid("sample_virtual: n_max must be >= 1");
    std::vector<CycleLengths> out;
    out.reserve(n_max);
    out.push_back(CycleLengths{1, {1}});
    for (std::uint64_t n = 1; n < n_max; ++n) out.push_back(crp_grow(out.back(), theta, rng));
    return out;
}

// Same trajectory as sample_virtual but keeping only the endpoint.
template <class Rng>
CycleLengths sample_cycles(std::uint64_t n, const ThetaParam& theta, Rng& rng) {
    CycleLengths c{1, {1}};
    for (std::uint64_t m = 1; m < n; ++m) c = crp_grow(c, theta, rng);
    return c;
}

inline NormalizedCycles normalize(const CycleLengths& state) {
    NormalizedCycles out;
    out.values.reserve(state.lengths.size());
    const double n = static_cast<double>(state.n);
    for (auto l : state.lengths) out.values.push_back(static_cast<double>(l) / n);
    return out;
}

// Ewens sampling formula for a cycle type given as multiplicities
// {cycle size -> count}: P = n! / theta^(n) * prod_i (theta/i)^k_i / k_i!.
inline double esf_type_probability(const ThetaParam& theta,
                                   const std::map<std::uint64_t, std::uint64_t>& type) {
    const double th = theta.value();
    std::uint64_t n = 0;
    for (auto [sz, k] : type) n += sz * k;
    double logp = 0.0;
    for (std::uint64_t m = 2; m <= n; ++m) logp += std::log(static_cast<double>(m));
    for (std::uint64_t m = 0; m < n; ++m) logp -= std::log(th + static_cast<double>(m));
    for (auto [sz, k] : type) {
        logp += static_cast<double>(k) * std::log(th / static_cast<double>(sz));
        for (std::uint64_t m = 2; m <= k; ++m) logp -= std::log(static_cast<double>(m));
    }
    return std::exp(logp);
}

// Kingman paintbox coupling: assign n elements i.i.d. to the sticks of a
// GEM(theta) sample (extending the stick sequence lazily when an element
// lands in the residual) and report class sizes in order of first
// appearance. The induced partition is exactly Ewens(theta) and its
// normalized class sizes converge to the very sticks used, which makes the
// finite-n versus limiting-count comparison a genuine coupled test.
template <class Rng>
CycleLengths paintbox_cycles(GemSample& gem, std::uint64_t n, Rng& rng) {
    std::vector<double> cdf;
    cdf.reserve(gem.sticks.size());
    double acc = 0.0;
    for (double y : gem.sticks) cdf.push_back(acc += y);

    std::vector<std::uint64_t> counts(gem.sticks.size(), 0);
    std::vector<std::size_t> appearance;
    for (std::uint64_t i = 0; i < n; ++i) {
        double u = rng.uniform01();
        while (cdf.empty() || u >= cdf.back()) {
            extend_gem(gem, rng);
            cdf.push_back((cdf.empty() ? 0.0 : cdf.back()) + gem.sticks.back());
            counts.push_back(0);
        }
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        if (counts[j]++ == 0) appearance.push_back(j);
    }
    CycleLengths out;
    out.n = n;
    out.lengths.reserve(appearance.size());
    for (std::size_t j : appearance) out.lengths.push_back(counts[j]);
    return out;
}

} // namespace ewens
