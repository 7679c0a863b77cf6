#include "cascade/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "cascade/error.hpp"
#include "cascade/smoothstep.hpp"

namespace cascade {

namespace {

void require_two_pi_box(const Grid3& grid, const char* name)
{
    if (std::abs(grid.box_length() - 2.0 * std::numbers::pi) > 1e-12) {
        throw PreconditionError(std::string(name) + " needs box_length = 2 pi (wrong box length)");
    }
}

// Minimum-image coordinate relative to 0 on a periodic axis of length L.
double min_image(double x, double L) { return x - L * std::round(x / L); }

}  // namespace

VectorField3 gen_abc(const Grid3& grid, double A, double B, double C, double T)
{
    require_two_pi_box(grid, "gen_abc");
    VectorField3 f(grid, TimeAxis::steady(T));
    f.p.assign(grid.size(), 0.0);
    const double mean_energy = 0.5 * (A * A + B * B + C * C);
    const int n = grid.n();
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const Vec3 x = grid.point(i, j, k);
                const std::size_t q = grid.index(i, j, k);
                double* v = f.u.data() + 3 * q;
                v[0] = A * std::sin(x.z) + C * std::cos(x.y);
                v[1] = B * std::sin(x.x) + A * std::cos(x.z);
                v[2] = C * std::sin(x.y) + B * std::cos(x.x);
                f.p[q] = -0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) + mean_energy;
            }
        }
    }
    return f;
}

VectorField3 gen_taylor_green(const Grid3& grid, double amplitude, double T)
{
    require_two_pi_box(grid, "gen_taylor_green");
    VectorField3 f(grid, TimeAxis::steady(T));
    const int n = grid.n();
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const Vec3 x = grid.point(i, j, k);
                double* v = f.u.data() + 3 * grid.index(i, j, k);
                const double cz = std::cos(x.z);
                v[0] = amplitude * std::sin(x.x) * std::cos(x.y) * cz;
                v[1] = -amplitude * std::cos(x.x) * std::sin(x.y) * cz;
                v[2] = 0.0;
            }
        }
    }
    return f;
}

SwirlProfile::SwirlProfile(const SwirlParams& params) : params_(params), r_taper_(0.75 * params.r_cut)
{
    if (!(params.alpha > 0.0 && params.alpha < 2.0 / 3.0)) {
        throw PreconditionError("alpha out of L3 range: need 0 < alpha < 2/3");
    }
    if (!(params.r_core >= 0.0 && params.r_cut > 0.0 && params.r_core < r_taper_)) {
        throw PreconditionError("swirl radii must satisfy 0 <= r_core < 0.75 r_cut");
    }
    taper_total_ = annulus_integral(r_taper_, params.r_cut);
}

double SwirlProfile::taper(double r) const
{
    static const SmoothStep step(2);
    return 1.0 - step.value((r - r_taper_) / (params_.r_cut - r_taper_));
}

double SwirlProfile::speed(double r) const
{
    if (r >= params_.r_cut) return 0.0;
    const double a = params_.alpha;
    double f;
    if (r < params_.r_core) {
        const double rho = r / params_.r_core;
        f = std::pow(params_.r_core, -a) * rho * (0.5 * (3.0 + a) - 0.5 * (1.0 + a) * rho * rho);
    } else {
        f = std::pow(r, -a);
    }
    return r > r_taper_ ? f * taper(r) : f;
}

double SwirlProfile::annulus_integral(double a, double b) const
{
    if (b <= a) return 0.0;
    using Gauss = boost::math::quadrature::gauss<double, 30>;
    constexpr int pieces = 8;
    const double w = (b - a) / pieces;
    double s = 0.0;
    for (int i = 0; i < pieces; ++i) {
        s += Gauss::integrate([&](double x) { const double f = speed(x); return f * f / x; }, a + i * w,
                              a + (i + 1) * w);
    }
    return s;
}

double SwirlProfile::pressure(double r) const
{
    const double a = params_.alpha;
    const double rc = params_.r_core;
    if (r >= params_.r_cut) return 0.0;
    if (r >= r_taper_) return -annulus_integral(r, params_.r_cut);
    // power-law part on [max(r, r_core), r_taper]
    const double lo = std::max(r, rc);
    double integral = taper_total_ + (std::pow(lo, -2.0 * a) - std::pow(r_taper_, -2.0 * a)) / (2.0 * a);
    if (r < rc) {
        const double a0 = 0.5 * (3.0 + a);
        const double b0 = 0.5 * (1.0 + a);
        const double rho = r / rc;
        const auto g = [&](double x) { const double v = a0 - b0 * x * x; return v * v * v; };
        integral += std::pow(rc, -2.0 * a) * (g(rho) - g(1.0)) / (6.0 * b0);
    }
    return -integral;
}

VectorField3 gen_singular_swirl(const Grid3& grid, const SwirlParams& params, double T)
{
    const SwirlProfile profile(params);
    const double L = grid.box_length();
    const double h = grid.spacing();
    if (!(params.r_cut < 0.5 * L)) throw PreconditionError("r_cut too large: need r_cut < box_length / 2");

    VectorField3 f(grid, TimeAxis::steady(T));
    f.p.assign(grid.size(), 0.0);
    const int n = grid.n();
    // The field does not depend on z: fill one plane, then replicate.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec3 x = grid.point(i, j, 0);
            const double dx = min_image(x.x, L);
            const double dy = min_image(x.y, L);
            const double r = std::hypot(dx, dy);
            if (params.r_core == 0.0 && r < 1e-3 * h) {
                throw PreconditionError("a grid node lies on the swirl axis; use an axis-offset grid");
            }
            const double speed = profile.speed(r);
            double* v = f.u.data() + 3 * grid.index(i, j, 0);
            v[0] = r > 0.0 ? -speed * dy / r : 0.0;
            v[1] = r > 0.0 ? speed * dx / r : 0.0;
            v[2] = 0.0;
            f.p[grid.index(i, j, 0)] = profile.pressure(r);
        }
    }
    const std::size_t plane = static_cast<std::size_t>(n) * n;
    for (int k = 1; k < n; ++k) {
        std::copy_n(f.u.begin(), 3 * plane, f.u.begin() + 3 * k * plane);
        std::copy_n(f.p.begin(), plane, f.p.begin() + k * plane);
    }
    return f;
}

VectorField3 gen_zero(const Grid3& grid, double T)
{
    VectorField3 f(grid, TimeAxis::steady(T));
    f.p.assign(grid.size(), 0.0);
    return f;
}

ScalarDensity gen_blob_density(const Grid3& grid, const TimeAxis& times, int blobs, double center_radius,
                               std::uint64_t seed)
{
    if (blobs < 1 || !(center_radius > 0.0)) throw PreconditionError("blob density needs blobs >= 1, radius > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> width(0.15, 0.4);
    std::uniform_real_distribution<double> amp(0.2, 1.0);
    struct Blob { Vec3 c; double w2; double a; };
    std::vector<Blob> list;
    while (static_cast<int>(list.size()) < blobs) {
        const Vec3 c{unit(rng), unit(rng), unit(rng)};
        if (norm2(c) > 1.0) continue;
        const double w = width(rng) * center_radius;
        list.push_back({c * center_radius, 2.0 * w * w, amp(rng)});
    }
    ScalarField field(grid, times);
    const int n = grid.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 x = grid.point(i, j, k);
                double d = 0.01;
                for (const auto& b : list) d += b.a * std::exp(-norm2(x - b.c) / b.w2);
                field.data[grid.index(i, j, k)] = d;
            }
    for (int t = 1; t < times.n_samples(); ++t) {
        std::copy_n(field.data.begin(), grid.size(), field.data.begin() + t * grid.size());
    }
    return ScalarDensity(std::move(field));
}

ScalarDensity gen_tube_density(const Grid3& grid, const TimeAxis& times, double radius, double half_length,
                               double amplitude)
{
    if (!(radius > 0.0 && half_length > 0.0 && amplitude >= 0.0)) {
        throw PreconditionError("tube density needs radius, half_length > 0 and amplitude >= 0");
    }
    const auto bump = [](double s) { if (s >= 1.0) return 0.0; const double v = 1.0 - s * s; return v * v * v; };
    ScalarField field(grid, times);
    const int n = grid.n();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 x = grid.point(i, j, k);
                const double r = std::hypot(x.x, x.y);
                field.data[grid.index(i, j, k)] = amplitude * bump(r / radius) * bump(std::abs(x.z) / half_length);
            }
    for (int t = 1; t < times.n_samples(); ++t) {
        std::copy_n(field.data.begin(), grid.size(), field.data.begin() + t * grid.size());
    }
    return ScalarDensity(std::move(field));
}

ScalarDensity gen_uniform_density(const Grid3& grid, const TimeAxis& times, double value)
{
    ScalarField field(grid, times);
    std::fill(field.data.begin(), field.data.end(), value);
    return ScalarDensity(std::move(field));
}

}  // namespace cascade
