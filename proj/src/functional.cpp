#include "cascade/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "cascade/error.hpp"
#include "cascade/spectral.hpp"

namespace cascade {

namespace {

using kernels::CutoffPatch;
using kernels::Exec;

void require_same_T(const TemporalCutoff& eta, const TimeAxis& times)
{
    if (std::abs(eta.T() - times.T()) > 1e-12 * times.T()) {
        throw PreconditionError("cutoff T = " + std::to_string(eta.T()) + " does not match the field's T = " +
                                std::to_string(times.T()));
    }
}

const std::vector<double>& weight_array(const CutoffPatch& patch, PatchWeight weight)
{
    if (weight == PatchWeight::psi) return patch.psi;
    if (patch.psi_delta.size() != patch.size()) throw PreconditionError("patch was sampled without psi^delta");
    return patch.psi_delta;
}

// sum_k w[k] (pairing at sample k), skipping zero weights.
template <class MakeTerm>
QuadratureResult pair_in_time(const Grid3& grid, std::span<const double> weights, const CutoffPatch& patch,
                              Exec exec, MakeTerm make)
{
    QuadratureResult total;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] == 0.0) continue;
        const auto sum = kernels::pair(exec, grid, patch, make(static_cast<int>(k)));
        const auto r = scale_patch_sum(sum, grid.cell_volume(), weights[k], patch.size());
        total.value += r.value;
        total.error += r.error;
    }
    return total;
}

void require_samples(std::span<const double> weights, int n_samples)
{
    if (static_cast<int>(weights.size()) != n_samples) {
        throw PreconditionError("time weights do not match the number of samples");
    }
}

LocalFunctionalValue make_value(const QuadratureResult& r, const SpatialCutoff& psi)
{
    return {r.value, r.error, psi.center(), psi.R()};
}

// One-hot weights selecting the sample of t, scaled by `factor`.
std::vector<double> at_sample(const TimeAxis& times, double t, double factor)
{
    std::vector<double> w(times.n_samples(), 0.0);
    w[sample_index(times, t)] = factor;
    return w;
}

// Gauss-Legendre nodes and weights on [-1, 1] for the supported sizes.
template <int N>
void gauss_table(std::vector<double>& x, std::vector<double>& w)
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& a = G::abscissa();
    const auto& b = G::weights();
    x.clear();
    w.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(b[i]);
        } else {
            x.push_back(a[i]);
            w.push_back(b[i]);
            x.push_back(-a[i]);
            w.push_back(b[i]);
        }
    }
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    switch (n) {
    case 4: gauss_table<4>(x, w); break;
    case 6: gauss_table<6>(x, w); break;
    case 8: gauss_table<8>(x, w); break;
    case 10: gauss_table<10>(x, w); break;
    case 12: gauss_table<12>(x, w); break;
    case 16: gauss_table<16>(x, w); break;
    case 20: gauss_table<20>(x, w); break;
    case 24: gauss_table<24>(x, w); break;
    case 32: gauss_table<32>(x, w); break;
    default: throw PreconditionError("Gauss-Legendre size must be one of 4, 6, 8, 10, 12, 16, 20, 24, 32");
    }
}

// Unit-scale stencil: directions and the weight rho'(s) s^2 * dOmega ds so
// that D = 1/(4 eps) sum_j c_j (yhat_j . du_j) |du_j|^2 with y_j = eps s_j yhat_j.
struct UnitStencil {
    std::vector<Vec3> offset;  // s yhat
    std::vector<Vec3> dir;     // yhat
    std::vector<double> c;
};

UnitStencil build_stencil(const DRStencil& st)
{
    if (st.azimuthal < 3) throw PreconditionError("dr stencil needs at least 3 azimuthal nodes");
    std::vector<double> xs, ws, xm, wm;
    gauss_legendre(st.radial, xs, ws);
    gauss_legendre(st.polar, xm, wm);

    // rho(s) = C (1 - s^2)^3, normalized so that 4 pi int rho s^2 ds = 1 on
    // the same radial nodes (mapped from [-1, 1] to [0, 1]).
    double mass = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double s = 0.5 * (xs[i] + 1.0);
        const double v = 1.0 - s * s;
        mass += 0.5 * ws[i] * v * v * v * s * s;
    }
    const double C = 1.0 / (4.0 * std::numbers::pi * mass);

    UnitStencil u;
    const double dphi = 2.0 * std::numbers::pi / st.azimuthal;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double s = 0.5 * (xs[i] + 1.0);
        const double v = 1.0 - s * s;
        const double drho = -6.0 * C * s * v * v;
        for (std::size_t j = 0; j < xm.size(); ++j) {
            const double mu = xm[j];
            const double sin_t = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            for (int k = 0; k < st.azimuthal; ++k) {
                const double phi = dphi * k;
                const Vec3 d{sin_t * std::cos(phi), sin_t * std::sin(phi), mu};
                u.dir.push_back(d);
                u.offset.push_back(d * s);
                u.c.push_back(0.5 * ws[i] * wm[j] * dphi * drho * s * s);
            }
        }
    }
    return u;
}

}  // namespace

TimeWeights time_weights(const TemporalCutoff& eta, const TimeAxis& times)
{
    require_same_T(eta, times);
    TimeWeights w;
    if (times.is_steady()) {
        w.value = {eta.integral()};
        w.value_delta = {eta.integral_delta()};
        w.derivative = {eta.integral_derivative()};
        return w;
    }
    const auto tw = times.trapezoid_weights();
    for (int k = 0; k < times.n_samples(); ++k) {
        const double t = times.time(k);
        w.value.push_back(tw[k] * eta.value(t));
        w.value_delta.push_back(tw[k] * eta.value_delta(t));
        w.derivative.push_back(tw[k] * eta.derivative(t));
    }
    return w;
}

int sample_index(const TimeAxis& times, double t)
{
    if (!(t > 0.0 && t < times.t_end())) throw PreconditionError("time outside (0, 2T)");
    if (times.is_steady()) return 0;
    const double dt = times.dt();
    const int k = static_cast<int>(std::lround(t / dt));
    if (std::abs(t - times.time(k)) > 1e-9 * dt) throw PreconditionError("time is not a sample time of the field");
    return k;
}

QuadratureResult pair_energy(const VectorField3& field, std::span<const double> weights, const CutoffPatch& patch,
                             PatchWeight weight, Exec exec)
{
    require_samples(weights, field.times.n_samples());
    const double* w = weight_array(patch, weight).data();
    return pair_in_time(field.grid, weights, patch, exec,
                        [&](int t) { return kernels::EnergyTerm{field.velocity(t).data(), w}; });
}

QuadratureResult pair_flux(const VectorField3& field, std::span<const double> weights, const CutoffPatch& patch,
                           Exec exec)
{
    require_samples(weights, field.times.n_samples());
    if (!field.has_pressure()) throw PreconditionError("flux pairing needs an attached pressure");
    if (patch.grad.size() != 3 * patch.size()) throw PreconditionError("patch was sampled without a gradient");
    return pair_in_time(field.grid, weights, patch, exec, [&](int t) {
        return kernels::FluxTerm{field.velocity(t).data(), field.pressure(t).data(), patch.grad.data()};
    });
}

QuadratureResult pair_scalar(const ScalarField& f, std::span<const double> weights, const CutoffPatch& patch,
                             PatchWeight weight, Exec exec)
{
    require_samples(weights, f.times.n_samples());
    const double* w = weight_array(patch, weight).data();
    return pair_in_time(f.grid, weights, patch, exec,
                        [&](int t) { return kernels::ScalarTerm{f.slice(t).data(), w}; });
}

LocalFunctionalValue local_energy(const VectorField3& field, const CutoffFunction& phi, double t, Exec exec)
{
    require_same_T(phi.eta(), field.times);
    SampleRequest req;
    req.psi_delta = true;
    req.delta = phi.delta();
    const auto patch = phi.psi().sample(field.grid, req, exec);
    const auto w = at_sample(field.times, t, phi.eta().value_delta(t));
    return make_value(pair_energy(field, w, patch, PatchWeight::psi_delta, exec), phi.psi());
}

FluxValue local_flux(const VectorField3& field, const CutoffFunction& phi, double t, Exec exec)
{
    if (!field.has_pressure()) return local_flux(spectral::solve_pressure(field), phi, t, exec);
    const int k = sample_index(field.times, t);
    const auto power = spectral::advective_power(field, k);
    return local_flux(field, power, phi, t, exec);
}

FluxValue local_flux(const VectorField3& field, std::span<const double> advective_power, const CutoffFunction& phi,
                     double t, Exec exec)
{
    require_same_T(phi.eta(), field.times);
    if (advective_power.size() != field.grid.size()) throw PreconditionError("advective power has the wrong size");
    SampleRequest req;
    req.gradient = true;
    const auto patch = phi.psi().sample(field.grid, req, exec);
    const double e = phi.eta().value(t);
    const auto w = at_sample(field.times, t, e);

    FluxValue out;
    out.gradient = make_value(pair_flux(field, w, patch, exec), phi.psi());
    const auto sum = kernels::pair(exec, field.grid, patch, kernels::ScalarTerm{advective_power.data(), patch.psi.data()});
    out.advective = make_value(scale_patch_sum(sum, field.grid.cell_volume(), e, patch.size()), phi.psi());
    out.discrepancy = std::abs(out.gradient.value - out.advective.value);
    return out;
}

AnomalousParts anomalous_parts(const VectorField3& field, const CutoffFunction& phi, Exec exec)
{
    if (!field.has_pressure()) throw PreconditionError("anomalous dissipation needs an attached pressure");
    const auto w = time_weights(phi.eta(), field.times);
    SampleRequest req;
    req.gradient = true;
    const auto patch = phi.psi().sample(field.grid, req, exec);

    AnomalousParts out;
    out.time_term = make_value(pair_energy(field, w.derivative, patch, PatchWeight::psi, exec), phi.psi());
    out.flux_term = make_value(pair_flux(field, w.value, patch, exec), phi.psi());
    out.total = out.time_term;
    out.total.value = out.time_term.value + out.flux_term.value;
    out.total.error = out.time_term.error + out.flux_term.error;
    return out;
}

LocalFunctionalValue anomalous_dissipation(const VectorField3& field, const CutoffFunction& phi, Exec exec)
{
    return anomalous_parts(field, phi, exec).total;
}

double viscous_balance_residual(const VectorField3& field, const CutoffFunction& phi, double nu, Exec exec)
{
    if (!(nu >= 0.0)) throw PreconditionError("viscosity must be >= 0");
    const double eps = anomalous_dissipation(field, phi, exec).value;
    if (nu == 0.0) return -eps;

    const auto w = time_weights(phi.eta(), field.times);
    SampleRequest req;
    req.laplacian = true;
    const auto patch = phi.psi().sample(field.grid, req, exec);
    double dissipation = 0.0;
    double diffusion = 0.0;
    for (int t = 0; t < field.times.n_samples(); ++t) {
        if (w.value[t] == 0.0) continue;
        const auto g2 = spectral::velocity_gradient_squared(field, t);
        const auto a = kernels::pair(exec, field.grid, patch, kernels::ScalarTerm{g2.data(), patch.psi.data()});
        const auto b = kernels::pair(exec, field.grid, patch,
                                     kernels::EnergyTerm{field.velocity(t).data(), patch.lap.data()});
        dissipation += w.value[t] * a.fine;
        diffusion += w.value[t] * b.fine;
    }
    const double h3 = field.grid.cell_volume();
    return -eps + nu * (dissipation * h3 - diffusion * h3);
}

Vec3 interpolate_velocity(const VectorField3& field, int t, const Vec3& x)
{
    const Grid3& g = field.grid;
    const double inv_h = 1.0 / g.spacing();
    int i0[3];
    double f[3];
    for (int a = 0; a < 3; ++a) {
        const double s = (x[a] - g.origin()[a]) * inv_h;
        const double fl = std::floor(s);
        i0[a] = static_cast<int>(fl);
        f[a] = s - fl;
    }
    const double* u = field.velocity(t).data();
    Vec3 out;
    for (int c = 0; c < 2; ++c) {
        const double wz = c ? f[2] : 1.0 - f[2];
        const int k = g.wrap(i0[2] + c);
        for (int b = 0; b < 2; ++b) {
            const double wy = b ? f[1] : 1.0 - f[1];
            const int j = g.wrap(i0[1] + b);
            for (int a = 0; a < 2; ++a) {
                const double wgt = (a ? f[0] : 1.0 - f[0]) * wy * wz;
                const double* v = u + 3 * g.index(g.wrap(i0[0] + a), j, k);
                out.x += wgt * v[0];
                out.y += wgt * v[1];
                out.z += wgt * v[2];
            }
        }
    }
    return out;
}

std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw PreconditionError("loglog_slope: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] != 0.0 && x[i] > 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(std::abs(y[i])));
        }
    }
    if (lx.size() < 2) return std::nullopt;
    const double m = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
    mx /= m;
    my /= m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

DRScan dr_scan(const VectorField3& field, double t, std::span<const Vec3> points, double eps_max, int k_max,
               const DRStencil& stencil, Exec exec)
{
    if (k_max < 0) throw PreconditionError("dr_scan needs k_max >= 0");
    const double h = field.grid.spacing();
    const double eps_min = std::ldexp(eps_max, -k_max);
    if (!(eps_min >= 2.0 * h)) {
        throw PreconditionError("stencil under-resolved: eps_max 2^-k_max = " + std::to_string(eps_min) +
                                " < 2h = " + std::to_string(2.0 * h));
    }
    const int ts = sample_index(field.times, t);
    const UnitStencil st = build_stencil(stencil);

    DRScan scan;
    scan.points.assign(points.begin(), points.end());
    for (int k = 0; k <= k_max; ++k) scan.eps.push_back(std::ldexp(eps_max, -k));
    scan.D.assign(scan.eps.size(), std::vector<double>(points.size(), 0.0));

    kernels::for_each_chunk(exec, static_cast<std::ptrdiff_t>(points.size()), [&](std::ptrdiff_t p) {
        const Vec3 x = points[p];
        const Vec3 u0 = interpolate_velocity(field, ts, x);
        for (std::size_t k = 0; k < scan.eps.size(); ++k) {
            const double e = scan.eps[k];
            double s = 0.0;
            for (std::size_t j = 0; j < st.c.size(); ++j) {
                const Vec3 du = interpolate_velocity(field, ts, x + st.offset[j] * e) - u0;
                s += st.c[j] * dot(st.dir[j], du) * norm2(du);
            }
            scan.D[k][p] = 0.25 * s / e;
        }
    });

    for (const auto& row : scan.D) {
        double m = 0.0;
        for (double d : row) m = std::max(m, std::abs(d));
        scan.D_abs_max.push_back(m);
    }
    scan.slope = loglog_slope(scan.eps, scan.D_abs_max);
    return scan;
}

}  // namespace cascade
