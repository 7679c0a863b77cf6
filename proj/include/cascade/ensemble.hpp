#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cascade/cover.hpp"
#include "cascade/cutoff.hpp"
#include "cascade/functional.hpp"
#include "cascade/grid.hpp"
#include "cascade/kernels.hpp"

namespace cascade {

/// 8^3: sublattices of spacing 4R in the lattice of spacing R/2.
inline constexpr int kSublattices = 512;

/// What the cover cutoffs are paired with. Non-owning; the referenced data
/// must outlive the source.
///   field         e = <1/2|u|^2, phi^delta>, eps = <1/2|u|^2, d_t phi> + flux
///   density       eps = <d, phi> (no energy)
///   density pair  e = <E, phi^delta>, eps = <d, phi>, flux = eps - <E, d_t phi>
class EnsembleSource {
public:
    enum class Kind { field, density, density_pair };

    static EnsembleSource field(const VectorField3& field);
    static EnsembleSource density(const ScalarDensity& d);
    static EnsembleSource density_pair(const ScalarField& energy, const ScalarDensity& d);

    Kind kind() const { return kind_; }
    bool has_energy() const { return kind_ != Kind::density; }
    const Grid3& grid() const;
    const TimeAxis& times() const;

    const VectorField3* velocity() const { return field_; }
    const ScalarField* energy() const { return energy_; }
    const ScalarDensity* dissipation() const { return density_; }

private:
    Kind kind_ = Kind::field;
    const VectorField3* field_ = nullptr;
    const ScalarField* energy_ = nullptr;
    const ScalarDensity* density_ = nullptr;
};

/// Raw spacetime pairings of one cutoff.
struct BallPairing {
    double e = 0.0, e_err = 0.0;        // iint E phi^delta
    double dt = 0.0, dt_err = 0.0;      // iint E d_t phi
    double flux = 0.0, flux_err = 0.0;  // eps - dt
    double eps = 0.0, eps_err = 0.0;
};

/// Cutoff patches of every ball of a cover, boundary balls with the cone
/// cutoff. Field sources need R > 4h; densities accept any R.
std::vector<kernels::CutoffPatch> sample_cover(const EnsembleSource& source, const Cover& cover, double delta,
                                               kernels::Exec exec = kernels::Exec::parallel);

/// Pairings per patch, parallel over patches.
std::vector<BallPairing> pair_patches(const EnsembleSource& source, const TemporalCutoff& eta,
                                      std::span<const kernels::CutoffPatch> patches,
                                      kernels::Exec exec = kernels::Exec::parallel);

/// Averages at one scale, each (1/(n T R^3)) sum_i of the per-ball value.
/// flux_R = eps_R - dt_R.
struct ScaleReport {
    double R = 0.0;
    std::size_t n = 0;
    double e = 0.0, e_err = 0.0;
    double dt = 0.0, dt_err = 0.0;
    double flux = 0.0, flux_err = 0.0;
    double eps = 0.0, eps_err = 0.0;
    bool has_energy = true;
};

struct EnsembleResult {
    ScaleReport report;
    std::vector<BallPairing> balls;
};

EnsembleResult ensemble_average(const EnsembleSource& source, const Cover& cover, const TemporalCutoff& eta,
                                kernels::Exec exec = kernels::Exec::parallel);
/// Same from patches already sampled by sample_cover.
EnsembleResult ensemble_average(const EnsembleSource& source, const Cover& cover, const TemporalCutoff& eta,
                                std::span<const kernels::CutoffPatch> patches,
                                kernels::Exec exec = kernels::Exec::parallel);

/// |flux_R - (eps_R - dt_R)| relative to max(|flux_R|, |eps_R|, |dt_R|).
double ene_eq_residual(const ScaleReport& r);

/// Integral-scale quantities with phi0 = eta psi0:
/// e0 = iint E phi0^delta / (T R0^3), eps0 = eps(phi0) / (T R0^3).
struct Baseline {
    double R0 = 0.0;
    double T = 0.0;
    double e0 = 0.0, e0_err = 0.0;
    double eps0 = 0.0, eps0_err = 0.0;
    BallPairing raw;  // unnormalized pairings of phi0
    std::optional<double> tau0;
};

Baseline integral_baseline(const EnsembleSource& source, double R0, const TemporalCutoff& eta,
                           kernels::Exec exec = kernels::Exec::parallel);

/// tau0 = sqrt(R0^2 e0 / (T eps0)); undefined when eps0 <= eps0_error or eps0 <= 0.
std::optional<double> taylor_scale(double e0, double eps0, double R0, double T, double eps0_error = 0.0);

/// Two-sided bounds eps0/K1 <= eps_R <= 512 K2 eps0 at one cover, plus the disjoint-family sums.
struct LemmaCheck {
    double R = 0.0;
    double eps_R = 0.0;
    double lower = 0.0;      // eps0 / K1
    double upper = 0.0;      // 8^3 K2 eps0
    double tolerance = 0.0;  // 1e-8 max(eps0, eps_R)
    bool lower_ok = false;
    bool upper_ok = false;
    std::size_t families = 0;
    double family_max = 0.0;  // largest sum_j eps_j over a family
    double family_bound = 0.0;  // T R0^3 eps0
    bool family_ok = false;
    bool disjoint = false;  // decomposition certificate

    bool ok() const { return lower_ok && upper_ok && family_ok && disjoint; }
};

LemmaCheck lemma_bounds_check(const Baseline& base, const Cover& cover, const EnsembleResult& ensemble);
/// Same with the decomposition of `cover` computed once by the caller.
LemmaCheck lemma_bounds_check(const Baseline& base, const Cover& cover, const EnsembleResult& ensemble,
                              const LatticeDecomposition& decomposition);
std::vector<LemmaCheck> lemma_bounds_check(const ScalarDensity& density, std::span<const Cover> covers,
                                           const TemporalCutoff& eta, kernels::Exec exec = kernels::Exec::parallel);

enum class ConstantsMode { as_derived, as_printed };
const char* to_string(ConstantsMode mode);
ConstantsMode parse_constants_mode(const std::string& s);

/// K = 8^3 K2.
/// as-derived: c = (C0 K2 K1)^-1/2, c0 = (1 - gamma^2) / K1, c1 = K + gamma^2 / K1.
/// as-printed: c = sqrt(K1 / (C0 K2)), c0 = K1 (1 - gamma^2), c1 = K (1 + (K1 / K) gamma^2).
struct CascadeConstants {
    double c = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
    double K = 0.0;
};
CascadeConstants cascade_constants(int K1, int K2, double C0, double gamma, ConstantsMode mode);

struct FluxBoundCheck {
    double R = 0.0;
    double flux = 0.0;
    double lower = 0.0;  // c0 eps0
    double upper = 0.0;  // c1 eps0
    bool holds = false;
};

struct CascadeVerdict {
    double gamma = 0.0;
    ConstantsMode mode = ConstantsMode::as_derived;
    int K1 = 0, K2 = 0;
    double C0 = 0.0;
    CascadeConstants constants;
    double R0 = 0.0;
    double eps0 = 0.0;
    std::optional<double> tau0;
    double threshold = 0.0;  // gamma c R0
    bool vacuous = false;    // tau0 undefined: the condition cannot fire
    bool condition_holds = false;
    std::vector<FluxBoundCheck> scales;
    bool bounds_hold = false;  // every scale inside [c0 eps0, c1 eps0]
};

/// A vacuous verdict (eps0 <= 0 or below its error) carries the constants
/// and the per-scale table but never fires.
CascadeVerdict cascade_verdict(const Baseline& base, std::span<const ScaleReport> scales, double gamma, int K1,
                               int K2, double C0, ConstantsMode mode);

/// tildePhi_R = R^3 Phi_R. Pairs (R, r) with R > r; bounds (c0/c1)(R/r)^3 and (c1/c0)(R/r)^3.
struct LocalityPair {
    double R = 0.0;
    double r = 0.0;
    double ratio = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool holds = false;
    bool skipped = false;  // Phi_r == 0
};

struct LocalityReport {
    std::vector<LocalityPair> pairs;  // every ordered pair R > r
    std::vector<int> dyadic_k;        // r = 2^k R_max
    std::vector<LocalityPair> dyadic; // the pairs with R = R_max and r = 2^k R_max
    bool all_hold = false;            // over the pairs not skipped
};

LocalityReport locality_ratios(std::span<const ScaleReport> scales, const CascadeConstants& constants);

/// eps_{0,R} = eps(eta psi_R) with psi_R the interior cutoff at the origin.
struct TubeScan {
    std::vector<double> radii;
    std::vector<double> eps;
    std::vector<double> err;
    double max_deviation = 0.0;  // max_{i,j} |eps_i - eps_j|
    double estimate = 0.0;       // max_{i,j} (err_i + err_j)
    double relative_deviation = 0.0;  // max_deviation / max_i |eps_i|
    bool within_estimate = false;
};

TubeScan tube_constancy_scan(const VectorField3& field, std::span<const double> radii, const TemporalCutoff& eta,
                             kernels::Exec exec = kernels::Exec::parallel);
/// <d, eta psi_R> for each radius; any R is accepted.
TubeScan tube_constancy_scan(const ScalarDensity& density, std::span<const double> radii, const TemporalCutoff& eta,
                             kernels::Exec exec = kernels::Exec::parallel);

/// Per-R0 comparison of iint E phi0^delta against gamma^2 c^2 T eps_{0,R0}.
struct SmallR0Row {
    double R0 = 0.0;
    double e0 = 0.0;
    double eps0 = 0.0;
    std::optional<double> tau0;
    double threshold = 0.0;  // gamma c R0
    bool holds = false;
};

struct SmallR0Search {
    std::vector<SmallR0Row> rows;
    std::optional<double> R0_star;  // largest listed R0 with the condition holding at it and every smaller one
};

SmallR0Search small_R0_search(const EnsembleSource& source, const TemporalCutoff& eta, double gamma, int K1, int K2,
                              ConstantsMode mode, std::span<const double> R0_list,
                              kernels::Exec exec = kernels::Exec::parallel);

}  // namespace cascade
