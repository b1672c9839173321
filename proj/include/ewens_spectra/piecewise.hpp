#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ewens_spectra/errors.hpp"
#include "ewens_spectra/summation.hpp"

namespace ewens {

// Piecewise polynomial on (0,1], degree <= 2, stored with global-x
// coefficients c0 + c1*x + c2*x^2 per piece. Breakpoints partition [0,1].
class PiecewisePoly {
public:
    PiecewisePoly(std::vector<double> breakpoints, std::vector<std::array<double, 3>> coeffs)
        : bp_(std::move(breakpoints)), c_(std::move(coeffs)) {
        if (bp_.size() != c_.size() + 1 || bp_.size() < 2 || bp_.front() != 0.0 ||
            bp_.back() != 1.0)
            throw ConfigInvalid("PiecewisePoly: breakpoints must run from 0 to 1");
    }

    // {t x} on (0,1) as a piecewise linear function, breakpoints at k/t.
    static PiecewisePoly frac_part(double t) {
        if (!(t > 0.0)) throw ConfigInvalid("frac_part: need t > 0");
        std::vector<double> bp{0.0};
        for (std::uint64_t k = 1; k < static_cast<std::uint64_t>(std::ceil(t)); ++k) {
            double x = static_cast<double>(k) / t;
            if (x < 1.0) bp.push_back(x);
        }
        bp.push_back(1.0);
        std::vector<std::array<double, 3>> cs;
        cs.reserve(bp.size() - 1);
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
            double mid = 0.5 * (bp[i] + bp[i + 1]);
            double k = std::floor(t * mid);
            cs.push_back({-k, t, 0.0});
        }
        return PiecewisePoly(std::move(bp), std::move(cs));
    }

    const std::vector<double>& breakpoints() const { return bp_; }
    std::size_t pieces() const { return c_.size(); }

    double eval(double x) const {
        const auto& c = c_[piece_index(x)];
        return c[0] + x * (c[1] + x * c[2]);
    }

    // this - other, on the merged breakpoint grid. Numerically coincident
    // breakpoints are merged within an absolute tolerance to avoid
    // zero-width pieces when the two grids share rational points.
    PiecewisePoly subtract(const PiecewisePoly& other, double merge_tol = 1e-12) const {
        std::vector<double> bp = merge_breakpoints(bp_, other.bp_, merge_tol);
        std::vector<std::array<double, 3>> cs;
        cs.reserve(bp.size() - 1);
        for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
            double mid = 0.5 * (bp[i] + bp[i + 1]);
            const auto& ca = c_[piece_index(mid)];
            const auto& cb = other.c_[other.piece_index(mid)];
            cs.push_back({ca[0] - cb[0], ca[1] - cb[1], ca[2] - cb[2]});
        }
        return PiecewisePoly(std::move(bp), std::move(cs));
    }

    // Square of a piecewise linear function (degree must be <= 1).
    PiecewisePoly square() const {
        std::vector<std::array<double, 3>> cs;
        cs.reserve(c_.size());
        for (const auto& c : c_) {
            if (c[2] != 0.0) throw ConfigInvalid("square: input degree must be <= 1");
            cs.push_back({c[0] * c[0], 2.0 * c[0] * c[1], c[1] * c[1]});
        }
        return PiecewisePoly(bp_, std::move(cs));
    }

    // integral_0^1 g(x) dx in closed form.
    double integral() const {
        NeumaierSum s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            double lo = bp_[i], hi = bp_[i + 1];
            const auto& c = c_[i];
            s.add(c[0] * (hi - lo) + c[1] * (hi * hi - lo * lo) / 2.0 +
                  c[2] * (hi * hi * hi - lo * lo * lo) / 3.0);
        }
        return s.value();
    }

    // integral_0^1 g(x)/x dx in closed form. Requires g(0+) = 0 on the first
    // piece, otherwise the integral diverges logarithmically.
    double integral_over_x() const {
        require_vanishing_at_zero();
        NeumaierSum s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            double lo = bp_[i], hi = bp_[i + 1];
            const auto& c = c_[i];
            s.add(c[1] * (hi - lo) + c[2] * (hi * hi - lo * lo) / 2.0);
            if (i > 0 && c[0] != 0.0) s.add(c[0] * std::log(hi / lo));
        }
        return s.value();
    }

    // integral_0^1 g({t x})/x dx for t >= 1, by unfolding to integral_0^t of
    // g({u})/u: one singular-free first period plus closed-form pieces
    // integral of poly(v)/(v+k) over each later period.
    double transform_integral_over_x(double t) const {
        if (!(t >= 1.0)) throw ConfigInvalid("transform_integral_over_x: need t >= 1");
        require_vanishing_at_zero();
        NeumaierSum s;
        s.add(integral_over_x());
        const auto whole = static_cast<std::uint64_t>(std::floor(t));
        for (std::uint64_t k = 1; k < whole; ++k) s.add(period_over_shifted_x(k, 1.0));
        double fracpart = t - static_cast<double>(whole);
        if (fracpart > 0.0 && whole >= 1) s.add(period_over_shifted_x(whole, fracpart));
        return s.value();
    }

private:
    std::size_t piece_index(double x) const {
        auto it = std::upper_bound(bp_.begin(), bp_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - bp_.begin());
        if (i == 0) return 0;
        if (i >= bp_.size()) return c_.size() - 1;
        return i - 1;
    }

    void require_vanishing_at_zero() const {
        if (std::abs(c_.front()[0]) > 1e-12)
            throw DivergentAtZero("g(0+) != 0: integral of g(x)/x diverges at 0");
    }

    // integral_0^upper g(v)/(v+k) dv via polynomial division:
    // (c0 + c1 v + c2 v^2)/(v+k) = c2 v + (c1 - c2 k) + (c0 - c1 k + c2 k^2)/(v+k).
    double period_over_shifted_x(std::uint64_t kk, double upper) const {
        const double k = static_cast<double>(kk);
        NeumaierSum s;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            double lo = bp_[i], hi = std::min(bp_[i + 1], upper);
            if (hi <= lo) break;
            const auto& c = c_[i];
            double rlog = c[0] - c[1] * k + c[2] * k * k;
            s.add(c[2] * (hi * hi - lo * lo) / 2.0 + (c[1] - c[2] * k) * (hi - lo) +
                  rlog * std::log((hi + k) / (lo + k)));
        }
        return s.value();
    }

    static std::vector<double> merge_breakpoints(const std::vector<double>& a,
                                                 const std::vector<double>& b, double tol) {
        std::vector<double> m;
        m.reserve(a.size() + b.size());
        std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
        std::vector<double> out{0.0};
        for (double x : m)
            if (x - out.back() > tol && x < 1.0) out.push_back(x);
        out.push_back(1.0);
        return out;
    }

    std::vector<double> bp_;
    std::vector<std::array<double, 3>> c_;
};

// integral_0^1 g(x)/x dx for a piecewise polynomial g with g(0+) = 0.
inline double piecewise_quadrature(const PiecewisePoly& g) { return g.integral_over_x(); }

} // namespace ewens
