#pragma once

#include "cascade/grid.hpp"
#include "cascade/kernels.hpp"
#include "cascade/smoothstep.hpp"
#include "cascade/vec3.hpp"

namespace cascade {

/// eta(t) = chi(t)^m on (0, 2T). chi is a C^2 quintic ramp: up on [0, T/4],
/// 1 on [T/4, 5T/4], down on [5T/4, 2T]. m = ceil(1/(1 - delta)) + 1 makes
/// |eta'| / eta^delta vanish at the support edges; C0 is measured on a dense
/// sample and inflated by 10%.
class TemporalCutoff {
public:
    TemporalCutoff(double T, double delta);

    double T() const { return T_; }
    double delta() const { return delta_; }
    int m() const { return m_; }
    double C0() const { return C0_; }

    double value(double t) const;
    double derivative(double t) const;
    double value_delta(double t) const;  // eta^delta
    /// |eta'(t)| / eta(t)^delta, 0 where eta = 0.
    double ratio(double t) const;

    /// Closed-form integrals over (0, 2T).
    double integral() const { return integral_; }
    double integral_delta() const { return integral_delta_; }
    double integral_derivative() const { return 0.0; }

    /// Largest sampled T |eta'| / eta^delta before the 10% margin.
    double sampled_sup() const { return sampled_sup_; }

private:
    double chi(double t) const;
    double chi_derivative(double t) const;

    double T_;
    double delta_;
    int m_;
    SmoothStep ramp_{2};
    double C0_ = 0.0;
    double sampled_sup_ = 0.0;
    double integral_ = 0.0;
    double integral_delta_ = 0.0;
};

TemporalCutoff make_eta(double T, double delta);

enum class CutoffKind { interior, boundary_cone, integral };

const char* to_string(CutoffKind kind);

/// What a sampled patch should carry besides psi.
struct SampleRequest {
    bool psi_delta = false;
    bool gradient = false;
    bool laplacian = false;
    double delta = 0.5;
};

/// Radial cutoffs. Interior: psi = S((2R - |x - x0|)/R), 1 on B(x0, R),
/// 0 outside B(x0, 2R). Integral (psi0): the interior profile at 0 with
/// radius R0. Boundary cone: psi0(x) S((2R - |P(x) - x0|)/R) with P the
/// radial projection onto the closed ball B(0, R0); it equals psi0 on the
/// cone patch over S(0, R0) intersected with B(x0, R).
/// S is the order-6 smoothstep (C^6).
class SpatialCutoff {
public:
    CutoffKind kind() const { return kind_; }
    const Vec3& center() const { return center_; }
    double R() const { return R_; }
    double R0() const { return R0_; }

    double value(const Vec3& x) const;
    Vec3 gradient(const Vec3& x) const;
    /// Interior and integral kinds only; the cone cutoff is merely Lipschitz
    /// across S(0, R0).
    double laplacian(const Vec3& x) const;

    /// psi0 at x (1 on B(0, R0)). Defined for every kind.
    double psi0(const Vec3& x) const;

    /// Axis-aligned box containing the support.
    void support_box(Vec3& lo, Vec3& hi) const;

    /// Samples on the grid nodes of the support box. Throws if the box
    /// would need a periodic wrap.
    kernels::CutoffPatch sample(const Grid3& grid, const SampleRequest& request,
                                kernels::Exec exec = kernels::Exec::parallel) const;

    /// R > 4h, the smallest radius the field functionals accept.
    bool resolvable(const Grid3& grid) const { return R_ > 4.0 * grid.spacing(); }

private:
    friend SpatialCutoff make_psi_interior(const Vec3&, double, const Grid3&, bool);
    friend SpatialCutoff make_psi_boundary(const Vec3&, double, double, const Grid3&, bool);
    friend SpatialCutoff make_psi0(double, const Grid3&, bool);

    SpatialCutoff(CutoffKind kind, Vec3 center, double R, double R0);

    double profile(double d, double radius) const;  // S((2 radius - d)/radius)
    double profile_d1(double d, double radius) const;
    double profile_d2(double d, double radius) const;

    CutoffKind kind_;
    Vec3 center_;
    double R_;
    double R0_;
    SmoothStep step_{6};
};

/// Interior cutoff. With require_resolved, R <= 4h is rejected.
SpatialCutoff make_psi_interior(const Vec3& x0, double R, const Grid3& grid, bool require_resolved = true);
/// Boundary-cone cutoff for x0 in B(0, R0) with B(x0, R) not inside B(0, R0).
SpatialCutoff make_psi_boundary(const Vec3& x0, double R, double R0, const Grid3& grid,
                                bool require_resolved = true);
/// psi0 for the integral scale R0.
SpatialCutoff make_psi0(double R0, const Grid3& grid, bool require_resolved = true);

/// Interior when B(x0, R) lies in the closed ball B(0, R0), boundary cone otherwise.
SpatialCutoff make_psi_for_ball(const Vec3& x0, double R, double R0, const Grid3& grid,
                                bool require_resolved = true);

/// phi = eta(t) psi(x).
class CutoffFunction {
public:
    CutoffFunction(TemporalCutoff eta, SpatialCutoff psi) : eta_(std::move(eta)), psi_(std::move(psi)) {}

    const TemporalCutoff& eta() const { return eta_; }
    const SpatialCutoff& psi() const { return psi_; }
    double delta() const { return eta_.delta(); }

    double phi(double t, const Vec3& x) const { return eta_.value(t) * psi_.value(x); }
    double phi_delta(double t, const Vec3& x) const;
    double dt_phi(double t, const Vec3& x) const { return eta_.derivative(t) * psi_.value(x); }
    Vec3 grad_phi(double t, const Vec3& x) const { return psi_.gradient(x) * eta_.value(t); }

    /// max over (time sample, grid node) of |d_t phi| - (C0/T) phi^delta.
    /// Nonpositive when the time-derivative bound holds.
    double time_bound_violation(const Grid3& grid, const TimeAxis& times) const;

private:
    TemporalCutoff eta_;
    SpatialCutoff psi_;
};

CutoffFunction assemble_phi(const TemporalCutoff& eta, const SpatialCutoff& psi);

}  // namespace cascade
