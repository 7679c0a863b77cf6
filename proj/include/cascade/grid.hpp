#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cascade/vec3.hpp"

namespace cascade {

/// Cubic periodic grid [origin, origin + box_length)^3 with n nodes per axis.
/// Samples are stored x-fastest: index = (k * n + j) * n + i.
class Grid3 {
public:
    Grid3(int n, double box_length, Vec3 origin);

    int n() const { return n_; }
    double box_length() const { return box_length_; }
    double spacing() const { return box_length_ / n_; }
    double cell_volume() const { const double h = spacing(); return h * h * h; }
    const Vec3& origin() const { return origin_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    std::size_t index(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(k) * n_ + j) * n_ + i;
    }
    Vec3 point(int i, int j, int k) const
    {
        const double h = spacing();
        return {origin_.x + h * i, origin_.y + h * j, origin_.z + h * k};
    }
    int wrap(int i) const { const int r = i % n_; return r < 0 ? r + n_ : r; }

    /// True when the closed axis-aligned box [lo, hi] lies strictly inside the
    /// fundamental cell, i.e. no periodic wrap is needed to sample it.
    bool contains_box(const Vec3& lo, const Vec3& hi) const;

    friend bool operator==(const Grid3&, const Grid3&) = default;

private:
    int n_;
    double box_length_;
    Vec3 origin_;
};

/// Grid centered on the coordinate origin: origin = (-L/2, -L/2, -L/2).
Grid3 make_grid(int n, double box_length);
Grid3 make_grid(int n, double box_length, Vec3 origin);

/// Centered grid shifted by h/2 in x and y, so no node lies on the z axis.
Grid3 make_axis_offset_grid(int n, double box_length);

/// Uniform samples on [0, 2T]. A single sample marks a steady field.
class TimeAxis {
public:
    TimeAxis(double t_end, int n_samples);

    static TimeAxis steady(double T) { return TimeAxis(2.0 * T, 1); }

    double t_end() const { return t_end_; }
    double T() const { return 0.5 * t_end_; }
    int n_samples() const { return n_samples_; }
    bool is_steady() const { return n_samples_ == 1; }
    double dt() const;
    double time(int k) const;

    /// Trapezoid weights on the samples; a steady axis gets weight t_end.
    std::vector<double> trapezoid_weights() const;

    friend bool operator==(const TimeAxis&, const TimeAxis&) = default;

private:
    double t_end_;
    int n_samples_;
};

/// Scalar samples on a grid and time axis, (t, z, y, x) order.
struct ScalarField {
    Grid3 grid;
    TimeAxis times;
    std::vector<double> data;

    ScalarField(Grid3 g, TimeAxis ta);
    ScalarField(Grid3 g, TimeAxis ta, std::vector<double> samples);

    std::span<const double> slice(int t) const { return {data.data() + t * grid.size(), grid.size()}; }
    std::span<double> slice(int t) { return {data.data() + t * grid.size(), grid.size()}; }
};

/// Nonnegative scalar density (e.g. a dissipation-rate measure). Negative or
/// non-finite samples are rejected on construction.
class ScalarDensity {
public:
    explicit ScalarDensity(ScalarField field);

    const ScalarField& field() const { return field_; }
    const Grid3& grid() const { return field_.grid; }
    const TimeAxis& times() const { return field_.times; }
    std::span<const double> slice(int t) const { return field_.slice(t); }

private:
    ScalarField field_;
};

/// Sampled velocity (three components per node) with optional pressure.
/// Velocity layout is (t, z, y, x, component); pressure is (t, z, y, x).
struct VectorField3 {
    Grid3 grid;
    TimeAxis times;
    std::vector<double> u;
    std::vector<double> p;  // empty when no pressure is attached

    VectorField3(Grid3 g, TimeAxis ta);

    bool has_pressure() const { return !p.empty(); }
    bool steady() const { return times.is_steady(); }

    std::span<const double> velocity(int t) const { return {u.data() + 3 * t * grid.size(), 3 * grid.size()}; }
    std::span<double> velocity(int t) { return {u.data() + 3 * t * grid.size(), 3 * grid.size()}; }
    std::span<const double> pressure(int t) const { return {p.data() + t * grid.size(), grid.size()}; }
    std::span<double> pressure(int t) { return {p.data() + t * grid.size(), grid.size()}; }

    /// Throws FormatError if any sample is NaN or infinite.
    void check_finite() const;

    /// Max |u| over all samples, optionally ignoring nodes closer than
    /// `exclude_radius` to the z axis through (0, 0).
    double max_speed(double exclude_radius = 0.0) const;
};

}  // namespace cascade
