#include "cascade/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cascade/error.hpp"

namespace cascade {

namespace {

constexpr int kSupSamples = 200000;

int power_for_delta(double delta)
{
    // 1/(1 - 2/3) evaluates to 3.0000000000000004; the slack keeps ceil honest.
    return static_cast<int>(std::ceil(1.0 / (1.0 - delta) - 1e-9)) + 1;
}

std::string fmt(double v) { return std::to_string(v); }

}  // namespace

TemporalCutoff::TemporalCutoff(double T, double delta) : T_(T), delta_(delta)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw PreconditionError("time cutoff needs T > 0");
    if (!(delta > 0.0)) throw PreconditionError("delta must be > 0");
    if (!(delta < 1.0)) {
        throw PreconditionError("delta >= 1 is not supported: no smooth compactly supported eta has "
                                "|eta'| <= (C0/T) eta near its support edge");
    }
    m_ = power_for_delta(delta);

    double sup = 0.0;
    for (int k = 0; k < kSupSamples; ++k) {
        const double t = 2.0 * T_ * (k + 0.5) / kSupSamples;
        sup = std::max(sup, T_ * ratio(t));
    }
    sampled_sup_ = sup;
    C0_ = 1.1 * sup;

    // Both ramps are S of a rescaled variable, so each contributes its
    // length times int_0^1 S^p.
    const auto ramp_power_integral = [&](double p) {
        if (p == std::floor(p) && 5.0 * p <= 79.0) return ramp_.integral_of_power(static_cast<int>(p));
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double s) { return std::pow(ramp_.value(s), p); }, 0.0, 1.0, 12, 1e-14);
    };
    integral_ = T_ * (1.0 + ramp_power_integral(m_));
    integral_delta_ = T_ * (1.0 + ramp_power_integral(m_ * delta_));
}

double TemporalCutoff::chi(double t) const
{
    if (t <= 0.0 || t >= 2.0 * T_) return 0.0;
    if (t < 0.25 * T_) return ramp_.value(t / (0.25 * T_));
    if (t <= 1.25 * T_) return 1.0;
    return ramp_.value((2.0 * T_ - t) / (0.75 * T_));
}

double TemporalCutoff::chi_derivative(double t) const
{
    if (t <= 0.0 || t >= 2.0 * T_) return 0.0;
    if (t < 0.25 * T_) return ramp_.d1(t / (0.25 * T_)) / (0.25 * T_);
    if (t <= 1.25 * T_) return 0.0;
    return -ramp_.d1((2.0 * T_ - t) / (0.75 * T_)) / (0.75 * T_);
}

double TemporalCutoff::value(double t) const { return std::pow(chi(t), m_); }

double TemporalCutoff::derivative(double t) const
{
    const double c = chi(t);
    return c > 0.0 ? m_ * std::pow(c, m_ - 1) * chi_derivative(t) : 0.0;
}

double TemporalCutoff::value_delta(double t) const
{
    const double c = chi(t);
    return c > 0.0 ? std::pow(c, m_ * delta_) : 0.0;
}

double TemporalCutoff::ratio(double t) const
{
    const double c = chi(t);
    if (c <= 0.0) return 0.0;
    return m_ * std::abs(chi_derivative(t)) * std::pow(c, m_ * (1.0 - delta_) - 1.0);
}

TemporalCutoff make_eta(double T, double delta) { return TemporalCutoff(T, delta); }

const char* to_string(CutoffKind kind)
{
    switch (kind) {
    case CutoffKind::interior: return "interior";
    case CutoffKind::boundary_cone: return "boundary-cone";
    case CutoffKind::integral: return "integral";
    }
    return "?";
}

SpatialCutoff::SpatialCutoff(CutoffKind kind, Vec3 center, double R, double R0)
    : kind_(kind), center_(center), R_(R), R0_(R0)
{
}

double SpatialCutoff::profile(double d, double radius) const { return step_.value((2.0 * radius - d) / radius); }
double SpatialCutoff::profile_d1(double d, double radius) const
{
    return -step_.d1((2.0 * radius - d) / radius) / radius;
}
double SpatialCutoff::profile_d2(double d, double radius) const
{
    return step_.d2((2.0 * radius - d) / radius) / (radius * radius);
}

double SpatialCutoff::psi0(const Vec3& x) const { return profile(norm(x), R0_); }

double SpatialCutoff::value(const Vec3& x) const
{
    switch (kind_) {
    case CutoffKind::interior: return profile(norm(x - center_), R_);
    case CutoffKind::integral: return profile(norm(x), R0_);
    case CutoffKind::boundary_cone: {
        const double r = norm(x);
        if (r <= R0_) return profile(norm(x - center_), R_);
        const Vec3 y = x * (R0_ / r);
        return profile(r, R0_) * profile(norm(y - center_), R_);
    }
    }
    return 0.0;
}

Vec3 SpatialCutoff::gradient(const Vec3& x) const
{
    const auto radial = [&](const Vec3& c, double radius) -> Vec3 {
        const Vec3 v = x - c;
        const double d = norm(v);
        if (d == 0.0) return {};
        return v * (profile_d1(d, radius) / d);
    };
    switch (kind_) {
    case CutoffKind::interior: return radial(center_, R_);
    case CutoffKind::integral: return radial({}, R0_);
    case CutoffKind::boundary_cone: {
        const double r = norm(x);
        if (r <= R0_) return radial(center_, R_);
        const Vec3 xh = x * (1.0 / r);
        const Vec3 y = xh * R0_;
        const Vec3 w = y - center_;
        const double D = norm(w);
        const double g = profile(D, R_);
        Vec3 grad = xh * (profile_d1(r, R0_) * g);
        if (D > 0.0) {
            // grad D = (R0 / r) (I - xh xh^T) w / D
            const Vec3 tangential = w - xh * dot(xh, w);
            grad += tangential * (profile(r, R0_) * profile_d1(D, R_) * R0_ / (r * D));
        }
        return grad;
    }
    }
    return {};
}

double SpatialCutoff::laplacian(const Vec3& x) const
{
    if (kind_ == CutoffKind::boundary_cone) {
        throw PreconditionError("the boundary-cone cutoff has no pointwise Laplacian");
    }
    const Vec3 c = kind_ == CutoffKind::interior ? center_ : Vec3{};
    const double radius = kind_ == CutoffKind::interior ? R_ : R0_;
    const double d = norm(x - c);
    if (d <= radius) return 0.0;
    return profile_d2(d, radius) + 2.0 * profile_d1(d, radius) / d;
}

void SpatialCutoff::support_box(Vec3& lo, Vec3& hi) const
{
    for (int a = 0; a < 3; ++a) {
        switch (kind_) {
        case CutoffKind::interior:
            lo[a] = center_[a] - 2.0 * R_;
            hi[a] = center_[a] + 2.0 * R_;
            break;
        case CutoffKind::integral:
            lo[a] = -2.0 * R0_;
            hi[a] = 2.0 * R0_;
            break;
        case CutoffKind::boundary_cone: {
            // The support lies in the union of lambda B(x0, 2R), lambda in [1, 2].
            const double l = center_[a] - 2.0 * R_;
            const double h = center_[a] + 2.0 * R_;
            lo[a] = std::max(-2.0 * R0_, std::min(l, 2.0 * l));
            hi[a] = std::min(2.0 * R0_, std::max(h, 2.0 * h));
            break;
        }
        }
    }
}

kernels::CutoffPatch SpatialCutoff::sample(const Grid3& grid, const SampleRequest& request,
                                           kernels::Exec exec) const
{
    if (request.laplacian && kind_ == CutoffKind::boundary_cone) {
        throw PreconditionError("the boundary-cone cutoff has no pointwise Laplacian");
    }
    Vec3 lo, hi;
    support_box(lo, hi);
    if (!grid.contains_box(lo, hi)) throw PreconditionError("cutoff support escapes the box");

    kernels::CutoffPatch patch;
    const double h = grid.spacing();
    for (int a = 0; a < 3; ++a) {
        const int first = std::max(0, static_cast<int>(std::ceil((lo[a] - grid.origin()[a]) / h)));
        const int last = std::min(grid.n() - 1, static_cast<int>(std::floor((hi[a] - grid.origin()[a]) / h)));
        patch.lo[a] = first;
        patch.count[a] = std::max(0, last - first + 1);
    }
    const std::size_t size = patch.size();
    patch.psi.assign(size, 0.0);
    if (request.psi_delta) patch.psi_delta.assign(size, 0.0);
    if (request.gradient) patch.grad.assign(3 * size, 0.0);
    if (request.laplacian) patch.lap.assign(size, 0.0);

    kernels::for_each_chunk(exec, patch.count[2], [&](std::ptrdiff_t c) {
        for (int b = 0; b < patch.count[1]; ++b) {
            for (int a = 0; a < patch.count[0]; ++a) {
                const Vec3 x = grid.point(patch.lo[0] + a, patch.lo[1] + b, patch.lo[2] + static_cast<int>(c));
                const std::size_t l = patch.local_index(a, b, static_cast<int>(c));
                const double v = value(x);
                patch.psi[l] = v;
                if (request.psi_delta) patch.psi_delta[l] = v > 0.0 ? std::pow(v, request.delta) : 0.0;
                if (request.gradient) {
                    const Vec3 g = gradient(x);
                    patch.grad[3 * l] = g.x;
                    patch.grad[3 * l + 1] = g.y;
                    patch.grad[3 * l + 2] = g.z;
                }
                if (request.laplacian) patch.lap[l] = laplacian(x);
            }
        }
    });
    return patch;
}

namespace {

void check_radius(double R, const Grid3& grid, bool require_resolved)
{
    if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("cutoff radius must be positive");
    if (require_resolved && !(R > 4.0 * grid.spacing())) {
        throw PreconditionError("unresolvable R: R = " + fmt(R) + " <= 4h = " + fmt(4.0 * grid.spacing()));
    }
}

void check_fits(const SpatialCutoff& psi, const Grid3& grid)
{
    Vec3 lo, hi;
    psi.support_box(lo, hi);
    if (!grid.contains_box(lo, hi)) throw PreconditionError("ball escapes box: cutoff support does not fit");
}

}  // namespace

SpatialCutoff make_psi_interior(const Vec3& x0, double R, const Grid3& grid, bool require_resolved)
{
    check_radius(R, grid, require_resolved);
    SpatialCutoff psi(CutoffKind::interior, x0, R, R);
    check_fits(psi, grid);
    return psi;
}

SpatialCutoff make_psi_boundary(const Vec3& x0, double R, double R0, const Grid3& grid, bool require_resolved)
{
    check_radius(R, grid, require_resolved);
    if (!(R0 >= R)) throw PreconditionError("boundary cutoff needs R <= R0");
    const double r = norm(x0);
    if (r > R0 * (1.0 + 1e-12)) throw PreconditionError("boundary cutoff center lies outside B(0, R0)");
    if (!(r + R > R0)) throw PreconditionError("boundary cutoff needs B(x0, R) to leave B(0, R0)");
    SpatialCutoff psi(CutoffKind::boundary_cone, x0, R, R0);
    check_fits(psi, grid);
    return psi;
}

SpatialCutoff make_psi0(double R0, const Grid3& grid, bool require_resolved)
{
    check_radius(R0, grid, require_resolved);
    SpatialCutoff psi(CutoffKind::integral, {}, R0, R0);
    check_fits(psi, grid);
    return psi;
}

SpatialCutoff make_psi_for_ball(const Vec3& x0, double R, double R0, const Grid3& grid, bool require_resolved)
{
    if (norm(x0) + R <= R0) return make_psi_interior(x0, R, grid, require_resolved);
    return make_psi_boundary(x0, R, R0, grid, require_resolved);
}

double CutoffFunction::phi_delta(double t, const Vec3& x) const
{
    const double p = psi_.value(x);
    return p > 0.0 ? eta_.value_delta(t) * std::pow(p, delta()) : 0.0;
}

double CutoffFunction::time_bound_violation(const Grid3& grid, const TimeAxis& times) const
{
    SampleRequest req;
    req.psi_delta = true;
    req.delta = delta();
    const auto patch = psi_.sample(grid, req);
    const double bound = eta_.C0() / eta_.T();
    double worst = -1e300;
    for (int k = 0; k < times.n_samples(); ++k) {
        const double t = times.time(k);
        const double ed = std::abs(eta_.derivative(t));
        const double edelta = eta_.value_delta(t);
        for (std::size_t l = 0; l < patch.size(); ++l) {
            worst = std::max(worst, ed * patch.psi[l] - bound * edelta * patch.psi_delta[l]);
        }
    }
    return worst;
}

CutoffFunction assemble_phi(const TemporalCutoff& eta, const SpatialCutoff& psi) { return CutoffFunction(eta, psi); }

}  // namespace cascade
