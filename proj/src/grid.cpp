#include "cascade/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascade/error.hpp"

namespace cascade {

Grid3::Grid3(int n, double box_length, Vec3 origin) : n_(n), box_length_(box_length), origin_(origin)
{
    if (n < 8) {
        throw PreconditionError("grid too coarse: n = " + std::to_string(n) + " < 8");
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
        throw PreconditionError("box length must be positive and finite");
    }
}

bool Grid3::contains_box(const Vec3& lo, const Vec3& hi) const
{
    for (int a = 0; a < 3; ++a) {
        if (lo[a] <= origin_[a] || hi[a] >= origin_[a] + box_length_) return false;
    }
    return true;
}

Grid3 make_grid(int n, double box_length)
{
    const double o = -0.5 * box_length;
    return Grid3(n, box_length, {o, o, o});
}

Grid3 make_grid(int n, double box_length, Vec3 origin) { return Grid3(n, box_length, origin); }

Grid3 make_axis_offset_grid(int n, double box_length)
{
    if (n < 8) return make_grid(n, box_length);  // let the constructor report it
    const double o = -0.5 * box_length;
    const double half_h = 0.5 * box_length / n;
    return Grid3(n, box_length, {o + half_h, o + half_h, o});
}

TimeAxis::TimeAxis(double t_end, int n_samples) : t_end_(t_end), n_samples_(n_samples)
{
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw PreconditionError("time axis needs t_end = 2T > 0");
    if (n_samples < 1) throw PreconditionError("time axis needs at least one sample");
}

double TimeAxis::dt() const { return n_samples_ > 1 ? t_end_ / (n_samples_ - 1) : t_end_; }

double TimeAxis::time(int k) const
{
    if (n_samples_ == 1) return T();
    return k == n_samples_ - 1 ? t_end_ : k * dt();
}

std::vector<double> TimeAxis::trapezoid_weights() const
{
    if (n_samples_ == 1) return {t_end_};
    std::vector<double> w(n_samples_, dt());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

ScalarField::ScalarField(Grid3 g, TimeAxis ta)
    : grid(g), times(ta), data(grid.size() * static_cast<std::size_t>(ta.n_samples()), 0.0)
{
}

ScalarField::ScalarField(Grid3 g, TimeAxis ta, std::vector<double> samples)
    : grid(g), times(ta), data(std::move(samples))
{
    if (data.size() != grid.size() * static_cast<std::size_t>(times.n_samples())) {
        throw PreconditionError("scalar samples do not match grid and time axis");
    }
}

ScalarDensity::ScalarDensity(ScalarField field) : field_(std::move(field))
{
    for (double v : field_.data) {
        if (!std::isfinite(v)) throw FormatError("density has non-finite samples");
        if (v < 0.0) throw PreconditionError("density must be nonnegative everywhere");
    }
}

VectorField3::VectorField3(Grid3 g, TimeAxis ta)
    : grid(g), times(ta), u(3 * grid.size() * static_cast<std::size_t>(ta.n_samples()), 0.0)
{
}

void VectorField3::check_finite() const
{
    const auto bad = [](double v) { return !std::isfinite(v); };
    if (std::any_of(u.begin(), u.end(), bad) || std::any_of(p.begin(), p.end(), bad)) {
        throw FormatError("field has non-finite samples");
    }
}

double VectorField3::max_speed(double exclude_radius) const
{
    const int n = grid.n();
    double best = 0.0;
    for (int t = 0; t < times.n_samples(); ++t) {
        const auto v = velocity(t);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    if (exclude_radius > 0.0) {
                        const Vec3 x = grid.point(i, j, k);
                        if (std::hypot(x.x, x.y) < exclude_radius) continue;
                    }
                    const std::size_t q = 3 * grid.index(i, j, k);
                    best = std::max(best, v[q] * v[q] + v[q + 1] * v[q + 1] + v[q + 2] * v[q + 2]);
                }
            }
        }
    }
    return std::sqrt(best);
}

}  // namespace cascade
