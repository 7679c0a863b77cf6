#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cascade/cutoff.hpp"
#include "cascade/grid.hpp"
#include "cascade/kernels.hpp"
#include "cascade/quadrature.hpp"

namespace cascade {

/// A localized quantity with its quadrature error estimate.
struct LocalFunctionalValue {
    double value = 0.0;
    double error = 0.0;
    Vec3 center;
    double R = 0.0;
};

/// Time quadrature of the eta factors on a sample axis. Sum_k w[k] g(t_k)
/// approximates the integral of eta (or eta^delta, eta') times g over
/// (0, 2T). A steady axis has one sample and the closed-form integrals.
struct TimeWeights {
    std::vector<double> value;
    std::vector<double> value_delta;
    std::vector<double> derivative;
};
TimeWeights time_weights(const TemporalCutoff& eta, const TimeAxis& times);

/// Sample index holding time t: 0 for a steady field, otherwise the sample
/// within 1e-9 dt of t. Throws outside (0, 2T) or between samples.
int sample_index(const TimeAxis& times, double t);

// Patch-level pairings, sum_k w[k] int g(t_k, x) weight(x) dx. Samples with
// w[k] == 0 are skipped; the error adds |w[k]| times each sample's estimate.
// The ensemble engine calls these per ball with Exec::serial.

enum class PatchWeight { psi, psi_delta };

/// g = 1/2 |u|^2.
QuadratureResult pair_energy(const VectorField3& field, std::span<const double> weights,
                             const kernels::CutoffPatch& patch, PatchWeight weight,
                             kernels::Exec exec = kernels::Exec::parallel);
/// g = (1/2 |u|^2 + p) u, paired with grad(psi). Requires a pressure.
QuadratureResult pair_flux(const VectorField3& field, std::span<const double> weights,
                           const kernels::CutoffPatch& patch, kernels::Exec exec = kernels::Exec::parallel);
/// g = a scalar field on the same grid and time axis.
QuadratureResult pair_scalar(const ScalarField& f, std::span<const double> weights, const kernels::CutoffPatch& patch,
                             PatchWeight weight, kernels::Exec exec = kernels::Exec::parallel);

/// e(t) = int 1/2 |u|^2 phi^delta dx.
LocalFunctionalValue local_energy(const VectorField3& field, const CutoffFunction& phi, double t,
                                  kernels::Exec exec = kernels::Exec::parallel);

/// Both displayed forms of the flux at time t:
///   gradient  int (1/2 |u|^2 + p) u . grad(phi) dx
///   advective -int ((u . grad) u + grad p) . u phi dx
struct FluxValue {
    LocalFunctionalValue gradient;
    LocalFunctionalValue advective;
    double discrepancy = 0.0;  // |gradient - advective|
};

/// Attaches a spectral pressure first when the field has none.
FluxValue local_flux(const VectorField3& field, const CutoffFunction& phi, double t,
                     kernels::Exec exec = kernels::Exec::parallel);
/// Same with the advective power density -((u . grad) u + grad p) . u at
/// the sample of t precomputed (spectral::advective_power), for reuse
/// across many cutoffs.
FluxValue local_flux(const VectorField3& field, std::span<const double> advective_power, const CutoffFunction& phi,
                     double t, kernels::Exec exec = kernels::Exec::parallel);

/// The two spacetime pairings of the anomalous dissipation.
struct AnomalousParts {
    LocalFunctionalValue time_term;  // iint 1/2 |u|^2 d_t phi
    LocalFunctionalValue flux_term;  // iint (1/2 |u|^2 + p) u . grad(phi)
    LocalFunctionalValue total;
};

/// epsilon = iint 1/2 |u|^2 d_t phi + iint (1/2 |u|^2 + p) u . grad(phi).
/// Negative values are returned as computed. Requires a pressure.
AnomalousParts anomalous_parts(const VectorField3& field, const CutoffFunction& phi,
                               kernels::Exec exec = kernels::Exec::parallel);
LocalFunctionalValue anomalous_dissipation(const VectorField3& field, const CutoffFunction& phi,
                                           kernels::Exec exec = kernels::Exec::parallel);

/// <d_t(1/2|u|^2) + div((1/2|u|^2 + p) u) - nu lap(1/2|u|^2) + nu |grad u|^2, phi>
/// with every derivative moved onto phi:
///   -epsilon + nu (<|grad u|^2, phi> - <1/2 |u|^2, lap phi>).
/// nu = 0 returns exactly -epsilon. nu > 0 needs an interior or integral cutoff.
double viscous_balance_residual(const VectorField3& field, const CutoffFunction& phi, double nu,
                                kernels::Exec exec = kernels::Exec::parallel);

/// Spherical stencil for the Duchon-Robert pairing: Gauss-Legendre in the
/// radius and in cos(theta), trapezoid in the azimuth.
struct DRStencil {
    int radial = 12;
    int polar = 12;
    int azimuthal = 24;
};

/// D_k(x) = 1/4 int grad(rho_eps)(y) . du |du|^2 dy with du = u(x + y) - u(x),
/// rho_eps(y) = eps^-3 rho(|y|/eps), rho(s) = C (1 - s^2)^3 normalized on the
/// stencil, and u(x + y) by periodic trilinear interpolation.
struct DRScan {
    std::vector<Vec3> points;
    std::vector<double> eps;                  // eps_max 2^-k, strictly decreasing
    std::vector<std::vector<double>> D;       // D[k][point]
    std::vector<double> D_abs_max;            // max over points of |D[k][.]|
    std::optional<double> slope;              // least-squares d log|D| / d log eps
};

/// Throws when eps_max 2^-k_max < 2h (stencil under-resolved).
DRScan dr_scan(const VectorField3& field, double t, std::span<const Vec3> points, double eps_max, int k_max,
               const DRStencil& stencil = {}, kernels::Exec exec = kernels::Exec::parallel);

/// Periodic trilinear interpolation of the velocity at sample t.
Vec3 interpolate_velocity(const VectorField3& field, int t, const Vec3& x);

/// Least-squares slope of log|y| against log x over entries with y != 0;
/// empty when fewer than two such entries exist.
std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cascade
