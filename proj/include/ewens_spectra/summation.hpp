#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace ewens {

// Neumaier variant of Kahan summation. Keeps O(n) closed-form sums
// (n up to 1e7) accurate to a few ulps of the final value.
class NeumaierSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

} // namespace ewens
