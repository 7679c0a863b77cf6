#pragma once

#include <vector>

namespace cascade {

/// Polynomial smoothstep of order k: S(0) = 0, S(1) = 1, monotone, with
/// S'(s) = c_k s^k (1 - s)^k, so S is C^k across both ends of [0, 1].
/// Arguments outside [0, 1] are clamped.
class SmoothStep {
public:
    explicit SmoothStep(int order);

    int order() const { return order_; }
    double value(double s) const;
    double d1(double s) const;
    double d2(double s) const;

    /// Exact integral of S(s)^m over [0, 1] for integer m >= 1.
    double integral_of_power(int m) const;

private:
    double raw_value(double s) const;

    int order_;
    double lead_;                  // c_k
    std::vector<double> coeffs_;   // S(s) = sum coeffs_[i] s^i
};

}  // namespace cascade
