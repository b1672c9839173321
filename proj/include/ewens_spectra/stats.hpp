#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/special.hpp"
#include "ewens_spectra/summation.hpp"

namespace ewens {

// Replicated values of one counting statistic. Regenerable bit-exactly from
// (master_seed, statistic_id, replicate index) regardless of worker count.
struct StatSeries {
    std::string statistic_id;
    std::uint64_t master_seed = 0;
    std::vector<double> values;

    std::size_t replicate_count() const { return values.size(); }
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;       // unbiased
    double mean_stderr = 0.0;
    double variance_stderr = 0.0; // via fourth central moment
    std::size_t n = 0;
};

inline Moments moments(const std::vector<double>& v) {
    Moments m;
    m.n = v.size();
    if (v.empty()) return m;
    NeumaierSum s;
    for (double x : v) s.add(x);
    m.mean = s.value() / static_cast<double>(v.size());
    if (v.size() < 2) return m;
    NeumaierSum s2, s4;
    for (double x : v) {
        double d = x - m.mean;
        s2.add(d * d);
        s4.add(d * d * d * d);
    }
    const double n = static_cast<double>(v.size());
    m.variance = s2.value() / (n - 1.0);
    double m4 = s4.value() / n;
    double var_of_var = (m4 - (n - 3.0) / (n - 1.0) * m.variance * m.variance) / n;
    m.variance_stderr = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
    m.mean_stderr = std::sqrt(m.variance / n);
    return m;
}

struct KsVerdict {
    double statistic = 0.0;
    std::size_t n = 0;
    double threshold = 1.0;
    bool pass = false;
};

enum class Standardize { theoretical, empirical };

namespace detail {

inline bool integer_valued(const std::vector<double>& v) {
    for (double x : v)
        if (std::abs(x - std::nearbyint(x)) > 1e-6) return false;
    return true;
}

// Discrete sup over atoms, continuity-corrected: the normal CDF is read at
// half-integer midpoints since the counting statistics live on the integers.
// Values are snapped to their atoms first; the caller guarantees they are
// integral up to the truncation wobble.
inline double ks_discrete_vs_normal(std::vector<double> vals, double mu, double sigma) {
    for (double& v : vals) v = std::nearbyint(v);
    std::sort(vals.begin(), vals.end());
    const double n = static_cast<double>(vals.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < vals.size()) {
        std::size_t j = i;
        while (j < vals.size() && vals[j] == vals[i]) ++j;
        double femp = static_cast<double>(j) / n;
        double fref = normal_cdf((vals[i] + 0.5 - mu) / sigma);
        d = std::max(d, std::abs(femp - fref));
        i = j;
    }
    return d;
}

inline double ks_continuous_vs_normal(std::vector<double> vals, double mu, double sigma) {
    std::sort(vals.begin(), vals.end());
    const double n = static_cast<double>(vals.size());
    double d = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double z = (vals[i] - mu) / sigma;
        double f = normal_cdf(z);
        d = std::max(d, std::max((i + 1) / n - f, f - i / n));
    }
    return d;
}

} // namespace detail

// One-sample Kolmogorov-Smirnov distance to the standard normal after
// standardizing by either supplied (theoretical) or sample moments.
inline KsVerdict ks_normal(const StatSeries& series, Standardize mode, double threshold,
                           double mu = 0.0, double sigma = 1.0) {
    if (series.values.size() < 2) throw DegenerateSeries("ks_normal: series too short");
    if (mode == Standardize::empirical) {
        Moments m = moments(series.values);
        mu = m.mean;
        sigma = std::sqrt(m.variance);
    }
    if (!(sigma > 0.0)) throw DegenerateSeries("ks_normal: zero variance");
    KsVerdict v;
    v.n = series.values.size();
    v.threshold = threshold;
    v.statistic = detail::integer_valued(series.values)
                      ? detail::ks_discrete_vs_normal(series.values, mu, sigma)
                      : detail::ks_continuous_vs_normal(series.values, mu, sigma);
    v.pass = v.statistic < threshold;
    return v;
}

// Two-sample KS as the sup of the empirical CDF gap over the pooled atoms.
// Integer-valued series are snapped to their atoms so that the truncation
// wobble of the counting statistics cannot split an atom in two.
inline KsVerdict two_sample_distance(const StatSeries& x, const StatSeries& y,
                                     double threshold = 1.0) {
    std::vector<double> xs = x.values, ys = y.values;
    if (detail::integer_valued(xs) && detail::integer_valued(ys)) {
        for (double& v : xs) v = std::nearbyint(v);
        for (double& v : ys) v = std::nearbyint(v);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    std::vector<double> pooled = xs;
    pooled.insert(pooled.end(), ys.begin(), ys.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
    double d = 0.0;
    for (double v : pooled) {
        double fx = static_cast<double>(std::upper_bound(xs.begin(), xs.end(), v) - xs.begin()) /
                    static_cast<double>(xs.size());
        double fy = static_cast<double>(std::upper_bound(ys.begin(), ys.end(), v) - ys.begin()) /
                    static_cast<double>(ys.size());
        d = std::max(d, std::abs(fx - fy));
    }
    KsVerdict out;
    out.statistic = d;
    out.n = std::min(xs.size(), ys.size());
    out.threshold = threshold;
    out.pass = d < threshold;
    return out;
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> grid;       // log(scale)
    std::vector<double> variances;  // per-scale variance estimates
    std::vector<double> residuals;  // variance - slope*log(scale) - intercept
    std::vector<double> point_stderr;
    double slope_stderr = 0.0;
};

// Least-squares fit of per-scale variance estimates against log(scale), with
// per-point standard errors from fourth moments. The acceptance grids go down
// to 3 points over 2 decades, so that is where the guard sits.
inline FitResult variance_slope_fit(const std::vector<std::pair<double, const StatSeries*>>& per_scale) {
    if (per_scale.size() < 3) throw InsufficientGrid("variance_slope_fit: need >= 3 grid points");
    double lo = per_scale.front().first, hi = per_scale.front().first;
    for (const auto& [s, _] : per_scale) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi / lo < 99.0) throw InsufficientGrid("variance_slope_fit: grid must span >= 2 decades");

    FitResult f;
    for (const auto& [scale, series] : per_scale) {
        Moments m = moments(series->values);
        f.grid.push_back(std::log(scale));
        f.variances.push_back(m.variance);
        f.point_stderr.push_back(m.variance_stderr);
    }
    const double n = static_cast<double>(f.grid.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        sx += f.grid[i];
        sy += f.variances[i];
        sxx += f.grid[i] * f.grid[i];
        sxy += f.grid[i] * f.variances[i];
    }
    const double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double se2 = 0.0;
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        f.residuals.push_back(f.variances[i] - f.slope * f.grid[i] - f.intercept);
        // propagate per-point variance errors through the OLS weights
        double w = (n * f.grid[i] - sx) / denom;
        se2 += w * w * f.point_stderr[i] * f.point_stderr[i];
    }
    f.slope_stderr = std::sqrt(se2);
    return f;
}

struct MedianIqr {
    double median = 0.0;
    double iqr = 0.0;
};

inline MedianIqr median_iqr(std::vector<double> v) {
    if (v.empty()) throw DegenerateSeries("median_iqr: empty");
    std::sort(v.begin(), v.end());
    auto quantile = [&](double p) {
        double idx = p * (static_cast<double>(v.size()) - 1.0);
        std::size_t lo = static_cast<std::size_t>(idx);
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        double w = idx - static_cast<double>(lo);
        return v[lo] * (1.0 - w) + v[hi] * w;
    };
    return {quantile(0.5), quantile(0.75) - quantile(0.25)};
}

// Chi-square goodness of fit against given class probabilities; returns the
// p-value from the upper tail with df = classes - 1.
inline double chi_square_gof_pvalue(const std::vector<std::uint64_t>& observed,
                                    const std::vector<double>& probabilities) {
    if (observed.size() != probabilities.size() || observed.size() < 2)
        throw ConfigInvalid("chi_square_gof_pvalue: need matching classes >= 2");
    std::uint64_t total = 0;
    for (auto o : observed) total += o;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = probabilities[i] * static_cast<double>(total);
        double d = static_cast<double>(observed[i]) - e;
        chi2 += d * d / e;
    }
    return chi_square_pvalue(chi2, static_cast<int>(observed.size()) - 1);
}

inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw ConfigInvalid("pearson_correlation: length mismatch");
    Moments ma = moments(a), mb = moments(b);
    NeumaierSum s;
    for (std::size_t i = 0; i < a.size(); ++i) s.add((a[i] - ma.mean) * (b[i] - mb.mean));
    double cov = s.value() / (static_cast<double>(a.size()) - 1.0);
    return cov / std::sqrt(ma.variance * mb.variance);
}

} // namespace ewens
