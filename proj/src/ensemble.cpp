#include "cascade/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "cascade/error.hpp"

namespace cascade {

namespace {

using kernels::CutoffPatch;
using kernels::Exec;

double cube(double x) { return x * x * x; }

std::vector<double> column(std::span<const BallPairing> balls, double BallPairing::*member)
{
    std::vector<double> v(balls.size());
    for (std::size_t i = 0; i < balls.size(); ++i) v[i] = balls[i].*member;
    return v;
}

double sum_of(std::span<const BallPairing> balls, double BallPairing::*member)
{
    return kernels::tree_sum(column(balls, member));
}

CutoffPatch sample_one(const EnsembleSource& source, const SpatialCutoff& psi, double delta, Exec exec)
{
    SampleRequest req;
    req.delta = delta;
    req.psi_delta = source.has_energy();
    req.gradient = source.kind() == EnsembleSource::Kind::field;
    return psi.sample(source.grid(), req, exec);
}

bool needs_resolution(const EnsembleSource& source) { return source.kind() == EnsembleSource::Kind::field; }

BallPairing pair_one(const EnsembleSource& source, const TimeWeights& w, const CutoffPatch& patch, Exec exec)
{
    BallPairing b;
    const auto set = [](double& v, double& e, const QuadratureResult& r) { v = r.value; e = r.error; };
    switch (source.kind()) {
    case EnsembleSource::Kind::field: {
        const VectorField3& f = *source.velocity();
        set(b.e, b.e_err, pair_energy(f, w.value_delta, patch, PatchWeight::psi_delta, exec));
        set(b.dt, b.dt_err, pair_energy(f, w.derivative, patch, PatchWeight::psi, exec));
        set(b.flux, b.flux_err, pair_flux(f, w.value, patch, exec));
        b.eps = b.dt + b.flux;
        b.eps_err = b.dt_err + b.flux_err;
        break;
    }
    case EnsembleSource::Kind::density:
        set(b.eps, b.eps_err, pair_scalar(source.dissipation()->field(), w.value, patch, PatchWeight::psi, exec));
        break;
    case EnsembleSource::Kind::density_pair: {
        const ScalarField& E = *source.energy();
        set(b.e, b.e_err, pair_scalar(E, w.value_delta, patch, PatchWeight::psi_delta, exec));
        set(b.dt, b.dt_err, pair_scalar(E, w.derivative, patch, PatchWeight::psi, exec));
        set(b.eps, b.eps_err, pair_scalar(source.dissipation()->field(), w.value, patch, PatchWeight::psi, exec));
        b.flux = b.eps - b.dt;
        b.flux_err = b.eps_err + b.dt_err;
        break;
    }
    }
    return b;
}

}  // namespace

EnsembleSource EnsembleSource::field(const VectorField3& field)
{
    if (!field.has_pressure()) throw PreconditionError("ensemble over a field needs an attached pressure");
    EnsembleSource s;
    s.kind_ = Kind::field;
    s.field_ = &field;
    return s;
}

EnsembleSource EnsembleSource::density(const ScalarDensity& d)
{
    EnsembleSource s;
    s.kind_ = Kind::density;
    s.density_ = &d;
    return s;
}

EnsembleSource EnsembleSource::density_pair(const ScalarField& energy, const ScalarDensity& d)
{
    if (!(energy.grid == d.grid()) || !(energy.times == d.times())) {
        throw PreconditionError("energy and dissipation densities must share grid and time axis");
    }
    for (double v : energy.data) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw PreconditionError("energy density must be finite and >= 0");
    }
    EnsembleSource s;
    s.kind_ = Kind::density_pair;
    s.energy_ = &energy;
    s.density_ = &d;
    return s;
}

const Grid3& EnsembleSource::grid() const { return field_ ? field_->grid : density_->grid(); }

const TimeAxis& EnsembleSource::times() const { return field_ ? field_->times : density_->times(); }

std::vector<CutoffPatch> sample_cover(const EnsembleSource& source, const Cover& cover, double delta, Exec exec)
{
    std::vector<SpatialCutoff> cutoffs;
    cutoffs.reserve(cover.n());
    for (const Vec3& x : cover.centers) {
        cutoffs.push_back(make_psi_for_ball(x, cover.R, cover.R0, source.grid(), needs_resolution(source)));
    }
    std::vector<CutoffPatch> patches(cover.n());
    kernels::for_each_chunk(exec, static_cast<std::ptrdiff_t>(cover.n()), [&](std::ptrdiff_t i) {
        patches[i] = sample_one(source, cutoffs[i], delta, Exec::serial);
    });
    return patches;
}

std::vector<BallPairing> pair_patches(const EnsembleSource& source, const TemporalCutoff& eta,
                                      std::span<const CutoffPatch> patches, Exec exec)
{
    const TimeWeights w = time_weights(eta, source.times());
    std::vector<BallPairing> out(patches.size());
    kernels::for_each_chunk(exec, static_cast<std::ptrdiff_t>(patches.size()),
                            [&](std::ptrdiff_t i) { out[i] = pair_one(source, w, patches[i], Exec::serial); });
    return out;
}

EnsembleResult ensemble_average(const EnsembleSource& source, const Cover& cover, const TemporalCutoff& eta,
                                Exec exec)
{
    const auto patches = sample_cover(source, cover, eta.delta(), exec);
    return ensemble_average(source, cover, eta, patches, exec);
}

EnsembleResult ensemble_average(const EnsembleSource& source, const Cover& cover, const TemporalCutoff& eta,
                                std::span<const CutoffPatch> patches, Exec exec)
{
    if (patches.size() != cover.n()) throw PreconditionError("one patch per cover ball is required");
    if (cover.n() == 0) throw PreconditionError("empty cover");
    EnsembleResult out;
    out.balls = pair_patches(source, eta, patches, exec);

    ScaleReport& r = out.report;
    r.R = cover.R;
    r.n = cover.n();
    r.has_energy = source.has_energy();
    const double scale = 1.0 / (static_cast<double>(cover.n()) * eta.T() * cube(cover.R));
    const std::span<const BallPairing> b = out.balls;
    r.e = sum_of(b, &BallPairing::e) * scale;
    r.e_err = sum_of(b, &BallPairing::e_err) * scale;
    r.dt = sum_of(b, &BallPairing::dt) * scale;
    r.dt_err = sum_of(b, &BallPairing::dt_err) * scale;
    r.eps = sum_of(b, &BallPairing::eps) * scale;
    r.eps_err = sum_of(b, &BallPairing::eps_err) * scale;
    if (source.kind() == EnsembleSource::Kind::field) {
        r.flux = sum_of(b, &BallPairing::flux) * scale;
    } else {
        r.flux = r.eps - r.dt;
    }
    r.flux_err = sum_of(b, &BallPairing::flux_err) * scale;
    return out;
}

double ene_eq_residual(const ScaleReport& r)
{
    const double m = std::max({std::abs(r.flux), std::abs(r.eps), std::abs(r.dt)});
    const double d = std::abs(r.flux - (r.eps - r.dt));
    return m > 0.0 ? d / m : d;
}

Baseline integral_baseline(const EnsembleSource& source, double R0, const TemporalCutoff& eta, Exec exec)
{
    const SpatialCutoff psi0 = make_psi0(R0, source.grid(), needs_resolution(source));
    const CutoffPatch patch = sample_one(source, psi0, eta.delta(), exec);
    const TimeWeights w = time_weights(eta, source.times());

    Baseline b;
    b.R0 = R0;
    b.T = eta.T();
    b.raw = pair_one(source, w, patch, exec);
    const double scale = 1.0 / (eta.T() * cube(R0));
    b.e0 = b.raw.e * scale;
    b.e0_err = b.raw.e_err * scale;
    b.eps0 = b.raw.eps * scale;
    b.eps0_err = b.raw.eps_err * scale;
    b.tau0 = taylor_scale(b.e0, b.eps0, R0, b.T, b.eps0_err);
    return b;
}

std::optional<double> taylor_scale(double e0, double eps0, double R0, double T, double eps0_error)
{
    if (!(eps0 > 0.0) || !(eps0 > eps0_error)) return std::nullopt;
    return std::sqrt(R0 * R0 * e0 / (T * eps0));
}

LemmaCheck lemma_bounds_check(const Baseline& base, const Cover& cover, const EnsembleResult& ensemble)
{
    return lemma_bounds_check(base, cover, ensemble, decompose_lattice(cover));
}

LemmaCheck lemma_bounds_check(const Baseline& base, const Cover& cover, const EnsembleResult& ensemble,
                              const LatticeDecomposition& dec)
{
    if (ensemble.balls.size() != cover.n()) throw PreconditionError("ensemble does not belong to this cover");
    LemmaCheck c;
    c.R = cover.R;
    c.eps_R = ensemble.report.eps;
    c.lower = base.eps0 / cover.K1;
    c.upper = static_cast<double>(kSublattices) * cover.K2 * base.eps0;
    c.tolerance = 1e-8 * std::max(std::abs(base.eps0), std::abs(c.eps_R));
    c.lower_ok = c.eps_R >= c.lower - c.tolerance;
    c.upper_ok = c.eps_R <= c.upper + c.tolerance;

    c.families = dec.sublattices();
    c.disjoint = dec.disjoint;
    c.family_bound = base.raw.eps;
    for (const auto& fam : dec.families) {
        std::vector<double> v;
        v.reserve(fam.size());
        for (std::size_t i : fam) {
            if (i >= cover.n()) throw PreconditionError("decomposition does not belong to this cover");
            v.push_back(ensemble.balls[i].eps);
        }
        c.family_max = std::max(c.family_max, kernels::tree_sum(v));
    }
    c.family_ok = c.family_max <= c.family_bound + 1e-8 * std::max(std::abs(c.family_bound), std::abs(c.family_max));
    return c;
}

std::vector<LemmaCheck> lemma_bounds_check(const ScalarDensity& density, std::span<const Cover> covers,
                                           const TemporalCutoff& eta, Exec exec)
{
    const EnsembleSource source = EnsembleSource::density(density);
    std::vector<LemmaCheck> out;
    std::optional<Baseline> base;
    for (const Cover& cover : covers) {
        if (!base || base->R0 != cover.R0) base = integral_baseline(source, cover.R0, eta, exec);
        out.push_back(lemma_bounds_check(*base, cover, ensemble_average(source, cover, eta, exec)));
    }
    return out;
}

const char* to_string(ConstantsMode mode) { return mode == ConstantsMode::as_derived ? "as-derived" : "as-printed"; }

ConstantsMode parse_constants_mode(const std::string& s)
{
    if (s == "as-derived") return ConstantsMode::as_derived;
    if (s == "as-printed") return ConstantsMode::as_printed;
    throw PreconditionError("unknown constants mode '" + s + "' (as-derived | as-printed)");
}

CascadeConstants cascade_constants(int K1, int K2, double C0, double gamma, ConstantsMode mode)
{
    if (K1 < 1 || K2 < 1) throw PreconditionError("cascade constants need K1, K2 >= 1");
    if (!(C0 > 0.0)) throw PreconditionError("cascade constants need C0 > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("gamma must lie in (0, 1)");
    CascadeConstants c;
    c.K = static_cast<double>(kSublattices) * K2;
    const double g2 = gamma * gamma;
    if (mode == ConstantsMode::as_derived) {
        c.c = 1.0 / std::sqrt(C0 * K2 * K1);
        c.c0 = (1.0 - g2) / K1;
        c.c1 = c.K + g2 / K1;
    } else {
        c.c = std::sqrt(K1 / (C0 * K2));
        c.c0 = K1 * (1.0 - g2);
        c.c1 = c.K * (1.0 + (K1 / c.K) * g2);
    }
    return c;
}

CascadeVerdict cascade_verdict(const Baseline& base, std::span<const ScaleReport> scales, double gamma, int K1,
                               int K2, double C0, ConstantsMode mode)
{
    CascadeVerdict v;
    v.gamma = gamma;
    v.mode = mode;
    v.K1 = K1;
    v.K2 = K2;
    v.C0 = C0;
    v.constants = cascade_constants(K1, K2, C0, gamma, mode);
    v.R0 = base.R0;
    v.eps0 = base.eps0;
    v.tau0 = taylor_scale(base.e0, base.eps0, base.R0, base.T, base.eps0_err);
    v.threshold = gamma * v.constants.c * base.R0;
    v.vacuous = !v.tau0.has_value();
    v.condition_holds = !v.vacuous && *v.tau0 < v.threshold;
    v.bounds_hold = true;
    for (const ScaleReport& s : scales) {
        FluxBoundCheck f;
        f.R = s.R;
        f.flux = s.flux;
        f.lower = v.constants.c0 * base.eps0;
        f.upper = v.constants.c1 * base.eps0;
        f.holds = f.lower <= f.flux && f.flux <= f.upper;
        v.bounds_hold = v.bounds_hold && f.holds;
        v.scales.push_back(f);
    }
    return v;
}

LocalityReport locality_ratios(std::span<const ScaleReport> scales, const CascadeConstants& constants)
{
    if (!(constants.c0 > 0.0 && constants.c1 > 0.0)) throw PreconditionError("locality needs c0, c1 > 0");
    // The ratio of two quotients can land one ulp outside a bound it meets exactly.
    constexpr double kSlack = 1e-12;
    LocalityReport rep;
    rep.all_hold = true;
    const auto make_pair = [&](const ScaleReport& a, const ScaleReport& b) {
        LocalityPair p;
        p.R = a.R;
        p.r = b.R;
        const double q = cube(a.R / b.R);
        p.lower = constants.c0 / constants.c1 * q;
        p.upper = constants.c1 / constants.c0 * q;
        if (b.flux == 0.0) {
            p.skipped = true;
            return p;
        }
        p.ratio = cube(a.R) * a.flux / (cube(b.R) * b.flux);
        p.holds = p.ratio >= p.lower * (1.0 - kSlack) && p.ratio <= p.upper * (1.0 + kSlack);
        return p;
    };
    for (const ScaleReport& a : scales) {
        for (const ScaleReport& b : scales) {
            if (!(a.R > b.R)) continue;
            rep.pairs.push_back(make_pair(a, b));
            if (!rep.pairs.back().skipped) rep.all_hold = rep.all_hold && rep.pairs.back().holds;
        }
    }
    if (scales.empty()) return rep;
    const auto top = std::max_element(scales.begin(), scales.end(),
                                      [](const ScaleReport& a, const ScaleReport& b) { return a.R < b.R; });
    for (const ScaleReport& b : scales) {
        if (!(b.R < top->R)) continue;
        const double k = std::log2(b.R / top->R);
        if (std::abs(k - std::round(k)) > 1e-9) continue;
        rep.dyadic_k.push_back(static_cast<int>(std::round(k)));
        rep.dyadic.push_back(make_pair(*top, b));
    }
    return rep;
}

namespace {

TubeScan finish_scan(TubeScan s)
{
    s.within_estimate = true;
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
        for (std::size_t j = i + 1; j < s.eps.size(); ++j) {
            const double d = std::abs(s.eps[i] - s.eps[j]);
            const double e = s.err[i] + s.err[j];
            s.max_deviation = std::max(s.max_deviation, d);
            s.estimate = std::max(s.estimate, e);
            s.within_estimate = s.within_estimate && d <= e;
        }
    }
    double m = 0.0;
    for (double v : s.eps) m = std::max(m, std::abs(v));
    s.relative_deviation = m > 0.0 ? s.max_deviation / m : s.max_deviation;
    return s;
}

void require_increasing(std::span<const double> radii)
{
    if (radii.empty()) throw PreconditionError("tube scan needs at least one radius");
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) throw PreconditionError("tube radii must be increasing");
    }
}

}  // namespace

TubeScan tube_constancy_scan(const VectorField3& field, std::span<const double> radii, const TemporalCutoff& eta,
                             Exec exec)
{
    require_increasing(radii);
    TubeScan s;
    for (double R : radii) {
        const CutoffFunction phi(eta, make_psi_interior({}, R, field.grid));
        const auto v = anomalous_dissipation(field, phi, exec);
        s.radii.push_back(R);
        s.eps.push_back(v.value);
        s.err.push_back(v.error);
    }
    return finish_scan(std::move(s));
}

TubeScan tube_constancy_scan(const ScalarDensity& density, std::span<const double> radii, const TemporalCutoff& eta,
                             Exec exec)
{
    require_increasing(radii);
    const TimeWeights w = time_weights(eta, density.times());
    TubeScan s;
    for (double R : radii) {
        const auto patch = make_psi_interior({}, R, density.grid(), false).sample(density.grid(), {}, exec);
        const auto v = pair_scalar(density.field(), w.value, patch, PatchWeight::psi, exec);
        s.radii.push_back(R);
        s.eps.push_back(v.value);
        s.err.push_back(v.error);
    }
    return finish_scan(std::move(s));
}

SmallR0Search small_R0_search(const EnsembleSource& source, const TemporalCutoff& eta, double gamma, int K1, int K2,
                              ConstantsMode mode, std::span<const double> R0_list, Exec exec)
{
    for (std::size_t i = 1; i < R0_list.size(); ++i) {
        if (!(R0_list[i] < R0_list[i - 1])) throw PreconditionError("R0 list must be decreasing");
    }
    const CascadeConstants c = cascade_constants(K1, K2, eta.C0(), gamma, mode);
    SmallR0Search out;
    for (double R0 : R0_list) {
        const Baseline b = integral_baseline(source, R0, eta, exec);
        SmallR0Row row;
        row.R0 = R0;
        row.e0 = b.e0;
        row.eps0 = b.eps0;
        row.tau0 = b.tau0;
        row.threshold = gamma * c.c * R0;
        row.holds = row.tau0 && *row.tau0 < row.threshold;
        out.rows.push_back(row);
    }
    for (auto it = out.rows.rbegin(); it != out.rows.rend() && it->holds; ++it) out.R0_star = it->R0;
    return out;
}

}  // namespace cascade
