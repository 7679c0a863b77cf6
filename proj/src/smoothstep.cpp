#include "cascade/smoothstep.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "cascade/error.hpp"

namespace cascade {

namespace {
double binom(int n, int k) { return boost::math::binomial_coefficient<double>(n, k); }
}  // namespace

SmoothStep::SmoothStep(int order) : order_(order)
{
    if (order < 1 || order > 10) throw PreconditionError("smoothstep order must be in [1, 10]");
    const int k = order;
    coeffs_.assign(2 * k + 2, 0.0);
    for (int j = 0; j <= k; ++j) {
        coeffs_[k + 1 + j] = binom(k + j, j) * binom(2 * k + 1, k - j) * ((j % 2) ? -1.0 : 1.0);
    }
    lead_ = binom(2 * k + 1, k) * (k + 1);
}

double SmoothStep::raw_value(double s) const
{
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double SmoothStep::value(double s) const
{
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    // S(s) = 1 - S(1 - s); evaluating the small side keeps full relative precision near 1.
    return s <= 0.5 ? raw_value(s) : 1.0 - raw_value(1.0 - s);
}

double SmoothStep::d1(double s) const
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return lead_ * std::pow(s * (1.0 - s), order_);
}

double SmoothStep::d2(double s) const
{
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double w = s * (1.0 - s);
    return lead_ * order_ * std::pow(w, order_ - 1) * (1.0 - 2.0 * s);
}

double SmoothStep::integral_of_power(int m) const
{
    if (m < 1) throw PreconditionError("power must be positive");
    // S^m is a polynomial of degree (2k+1) m; 40 Gauss points are exact up to degree 79.
    if ((2 * order_ + 1) * m > 79) throw PreconditionError("power too large for exact quadrature");
    return boost::math::quadrature::gauss<double, 40>::integrate(
        [&](double s) { return std::pow(value(s), m); }, 0.0, 1.0);
}

}  // namespace cascade
