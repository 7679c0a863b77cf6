#include "cascade/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "cascade/error.hpp"
#include "cascade/field_io.hpp"
#include "cascade/spectral.hpp"

namespace cascade {

using nlohmann::json;

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json pairing_json(const BallPairing& b)
{
    return {{"e", b.e}, {"e_err", b.e_err}, {"dt", b.dt}, {"dt_err", b.dt_err},
            {"flux", b.flux}, {"flux_err", b.flux_err}, {"eps", b.eps}, {"eps_err", b.eps_err}};
}

json locality_pair_json(const LocalityPair& p)
{
    return {{"R", p.R}, {"r", p.r}, {"ratio", p.ratio}, {"lower", p.lower}, {"upper", p.upper},
            {"holds", p.holds}, {"skipped", p.skipped}};
}

void locality_row(std::ostringstream& out, const char* table, int k, const LocalityPair& p)
{
    out << table << ',' << k << ',' << num(p.R) << ',' << num(p.r) << ',' << num(p.ratio) << ',' << num(p.lower)
        << ',' << num(p.upper) << ',' << (p.holds ? 1 : 0) << ',' << (p.skipped ? 1 : 0) << '\n';
}

}  // namespace

json to_json(const CoverReport& r)
{
    return {{"n_ok", r.n_ok}, {"coverage_ok", r.coverage_ok}, {"multiplicity_max", r.multiplicity_max},
            {"uncovered", r.uncovered}, {"n_probe", r.n_probe}};
}

json to_json(const ScaleReport& r)
{
    return {{"R", r.R}, {"n", r.n}, {"e", r.e}, {"e_err", r.e_err}, {"dt", r.dt}, {"dt_err", r.dt_err},
            {"flux", r.flux}, {"flux_err", r.flux_err}, {"eps", r.eps}, {"eps_err", r.eps_err},
            {"has_energy", r.has_energy}};
}

json to_json(const Baseline& b)
{
    return {{"R0", b.R0}, {"T", b.T}, {"e0", b.e0}, {"e0_err", b.e0_err}, {"eps0", b.eps0},
            {"eps0_err", b.eps0_err}, {"tau0", opt(b.tau0)}, {"raw", pairing_json(b.raw)}};
}

json to_json(const LemmaCheck& c)
{
    return {{"R", c.R}, {"eps_R", c.eps_R}, {"lower", c.lower}, {"upper", c.upper},
            {"tolerance", c.tolerance}, {"lower_ok", c.lower_ok}, {"upper_ok", c.upper_ok},
            {"lower_margin", c.eps_R - c.lower}, {"upper_margin", c.upper - c.eps_R},
            {"families", c.families}, {"family_max", c.family_max}, {"family_bound", c.family_bound},
            {"family_ok", c.family_ok}, {"disjoint", c.disjoint}};
}

json to_json(const CascadeConstants& c) { return {{"c", c.c}, {"c0", c.c0}, {"c1", c.c1}, {"K", c.K}}; }

json to_json(const CascadeVerdict& v)
{
    json scales = json::array();
    for (const auto& s : v.scales) {
        scales.push_back({{"R", s.R}, {"flux", s.flux}, {"lower", s.lower}, {"upper", s.upper}, {"holds", s.holds}});
    }
    std::string status;
    if (v.vacuous) {
        status = "condition vacuous (eps0 <= quadrature error)";
    } else {
        status = v.condition_holds ? "condition holds" : "condition fails";
    }
    return {{"gamma", v.gamma}, {"mode", to_string(v.mode)}, {"K1", v.K1}, {"K2", v.K2}, {"C0", v.C0},
            {"constants", to_json(v.constants)}, {"R0", v.R0}, {"eps0", v.eps0}, {"tau0", opt(v.tau0)},
            {"threshold", v.threshold}, {"vacuous", v.vacuous}, {"condition_holds", v.condition_holds},
            {"status", status}, {"scales", scales}, {"bounds_hold", v.bounds_hold}};
}

json to_json(const LocalityReport& l)
{
    json pairs = json::array();
    for (const auto& p : l.pairs) pairs.push_back(locality_pair_json(p));
    json dyadic = json::array();
    for (std::size_t i = 0; i < l.dyadic.size(); ++i) {
        json row = locality_pair_json(l.dyadic[i]);
        row["k"] = l.dyadic_k[i];
        dyadic.push_back(row);
    }
    return {{"pairs", pairs}, {"dyadic", dyadic}, {"all_hold", l.all_hold}};
}

json to_json(const DRScan& s)
{
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back({p.x, p.y, p.z});
    return {{"points", pts}, {"eps", s.eps}, {"D", s.D}, {"D_abs_max", s.D_abs_max}, {"slope", opt(s.slope)}};
}

json to_json(const TubeScan& s)
{
    return {{"radii", s.radii}, {"eps", s.eps}, {"err", s.err}, {"max_deviation", s.max_deviation},
            {"estimate", s.estimate}, {"relative_deviation", s.relative_deviation},
            {"within_estimate", s.within_estimate}};
}

json to_json(const SmallR0Search& s)
{
    json rows = json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"R0", r.R0}, {"e0", r.e0}, {"eps0", r.eps0}, {"tau0", opt(r.tau0)},
                        {"threshold", r.threshold}, {"holds", r.holds}});
    }
    return {{"rows", rows}, {"R0_star", opt(s.R0_star)}};
}

ScaleReport scale_report_from_json(const json& j)
{
    ScaleReport r;
    r.R = j.at("R").get<double>();
    r.n = j.at("n").get<std::size_t>();
    r.e = j.at("e").get<double>();
    r.e_err = j.at("e_err").get<double>();
    r.dt = j.at("dt").get<double>();
    r.dt_err = j.at("dt_err").get<double>();
    r.flux = j.at("flux").get<double>();
    r.flux_err = j.at("flux_err").get<double>();
    r.eps = j.at("eps").get<double>();
    r.eps_err = j.at("eps_err").get<double>();
    r.has_energy = j.at("has_energy").get<bool>();
    return r;
}

Baseline baseline_from_json(const json& j)
{
    Baseline b;
    b.R0 = j.at("R0").get<double>();
    b.T = j.at("T").get<double>();
    b.e0 = j.at("e0").get<double>();
    b.e0_err = j.at("e0_err").get<double>();
    b.eps0 = j.at("eps0").get<double>();
    b.eps0_err = j.at("eps0_err").get<double>();
    if (!j.at("tau0").is_null()) b.tau0 = j.at("tau0").get<double>();
    const json& raw = j.at("raw");
    b.raw.e = raw.at("e").get<double>();
    b.raw.e_err = raw.at("e_err").get<double>();
    b.raw.dt = raw.at("dt").get<double>();
    b.raw.dt_err = raw.at("dt_err").get<double>();
    b.raw.flux = raw.at("flux").get<double>();
    b.raw.flux_err = raw.at("flux_err").get<double>();
    b.raw.eps = raw.at("eps").get<double>();
    b.raw.eps_err = raw.at("eps_err").get<double>();
    return b;
}

std::string scales_csv(const std::vector<ScaleReport>& scales)
{
    std::ostringstream out;
    out << "R,n,e_R,e_err,Phi_R,Phi_err,eps_R,eps_err,dt_R,dt_err\n";
    for (const auto& r : scales) {
        out << num(r.R) << ',' << r.n << ',' << num(r.e) << ',' << num(r.e_err) << ',' << num(r.flux) << ','
            << num(r.flux_err) << ',' << num(r.eps) << ',' << num(r.eps_err) << ',' << num(r.dt) << ','
            << num(r.dt_err) << '\n';
    }
    return out.str();
}

std::string locality_csv(const LocalityReport& l)
{
    std::ostringstream out;
    out << "table,k,R,r,ratio,lower,upper,holds,skipped\n";
    for (const auto& p : l.pairs) locality_row(out, "pair", 0, p);
    for (std::size_t i = 0; i < l.dyadic.size(); ++i) locality_row(out, "dyadic", l.dyadic_k[i], l.dyadic[i]);
    return out.str();
}

std::string dr_csv(const DRScan& s)
{
    std::ostringstream out;
    out << "k,eps,D_abs_max";
    for (std::size_t p = 0; p < s.points.size(); ++p) out << ",D" << p;
    out << '\n';
    for (std::size_t k = 0; k < s.eps.size(); ++k) {
        out << k << ',' << num(s.eps[k]) << ',' << num(s.D_abs_max[k]);
        for (double d : s.D[k]) out << ',' << num(d);
        out << '\n';
    }
    return out.str();
}

std::string tube_csv(const TubeScan& s)
{
    std::ostringstream out;
    out << "R,eps_0R,err,deviation_from_first\n";
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
        out << num(s.radii[i]) << ',' << num(s.eps[i]) << ',' << num(s.err[i]) << ','
            << num(std::abs(s.eps[i] - s.eps[0])) << '\n';
    }
    return out.str();
}

std::string AnalysisConfig::echo() const
{
    std::ostringstream out;
    out << "[analyze]\n";
    const auto line = [&](const char* key, const std::string& v) {
        if (!v.empty()) out << key << '=' << v << '\n';
    };
    line("field", field);
    line("density", density);
    line("energy", energy);
    line("R0", num(R0));
    line("delta", num(delta));
    line("gamma", num(gamma));
    line("K1", std::to_string(K1));
    line("K2", std::to_string(K2));
    line("k-min", std::to_string(k_min));
    line("k-max", std::to_string(k_max));
    line("seed", std::to_string(seed));
    line("jitter", num(jitter));
    line("n-probe", std::to_string(n_probe));
    line("mode", mode);
    return out.str();
}

AnalysisReport run_analysis(const AnalysisConfig& config, kernels::Exec exec)
{
    if (config.field.empty() == config.density.empty()) {
        throw PreconditionError("analysis needs exactly one of a velocity field or a dissipation density");
    }
    if (!config.energy.empty() && config.density.empty()) {
        throw PreconditionError("an energy density is only meaningful with a dissipation density");
    }
    const ConstantsMode mode = parse_constants_mode(config.mode);

    std::unique_ptr<VectorField3> field;
    std::unique_ptr<ScalarDensity> density;
    std::unique_ptr<ScalarDensity> energy;
    std::optional<EnsembleSource> source;
    AnalysisReport rep;
    rep.config = config;
    if (!config.field.empty()) {
        field = std::make_unique<VectorField3>(read_field(config.field));
        if (!field->has_pressure()) *field = spectral::solve_pressure(std::move(*field));
        source = EnsembleSource::field(*field);
        rep.source_kind = "field";
    } else {
        density = std::make_unique<ScalarDensity>(read_density(config.density));
        if (config.energy.empty()) {
            source = EnsembleSource::density(*density);
            rep.source_kind = "density";
        } else {
            energy = std::make_unique<ScalarDensity>(read_density(config.energy));
            source = EnsembleSource::density_pair(energy->field(), *density);
            rep.source_kind = "density-pair";
        }
    }

    rep.T = source->times().T();
    const TemporalCutoff eta = make_eta(rep.T, config.delta);
    rep.C0 = eta.C0();
    rep.m = eta.m();
    rep.baseline = integral_baseline(*source, config.R0, eta, exec);

    const auto radii = dyadic_scales(config.R0, config.k_min, config.k_max);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        CoverOptions opts;
        opts.jitter = config.jitter;
        opts.seed = config.seed + i;
        opts.n_probe = config.n_probe;
        const Cover cover = generate_cover(config.R0, radii[i], config.K1, config.K2, opts, exec);
        rep.covers.push_back(cover.verification);
        const EnsembleResult res = ensemble_average(*source, cover, eta, exec);
        rep.scales.push_back(res.report);
        if (source->kind() != EnsembleSource::Kind::field) {
            rep.lemma.push_back(lemma_bounds_check(rep.baseline, cover, res));
        }
    }
    rep.verdict = cascade_verdict(rep.baseline, rep.scales, config.gamma, config.K1, config.K2, rep.C0, mode);
    rep.locality = locality_ratios(rep.scales, rep.verdict.constants);
    return rep;
}

json to_json(const AnalysisReport& r)
{
    json cfg = json::object();
    std::istringstream in(r.config.echo());
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        cfg[line.substr(0, eq)] = line.substr(eq + 1);
    }
    json scales = json::array();
    for (std::size_t i = 0; i < r.scales.size(); ++i) {
        json s = to_json(r.scales[i]);
        s["cover"] = to_json(r.covers[i]);
        if (i < r.lemma.size()) s["lemma"] = to_json(r.lemma[i]);
        s["ene_eq_residual"] = ene_eq_residual(r.scales[i]);
        scales.push_back(s);
    }
    return {{"tool", kToolVersion}, {"config", cfg}, {"source", r.source_kind}, {"T", r.T},
            {"delta", r.config.delta}, {"C0", r.C0}, {"m", r.m}, {"baseline", to_json(r.baseline)},
            {"scales", scales}, {"verdict", to_json(r.verdict)}, {"locality", to_json(r.locality)}};
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

void write_analysis(const AnalysisReport& r, const std::string& dir)
{
    std::filesystem::create_directories(dir);
    const std::filesystem::path d(dir);
    write_text((d / "report.json").string(), to_json(r).dump(2) + "\n");
    write_text((d / "scales.csv").string(), scales_csv(r.scales));
    write_text((d / "locality.csv").string(), locality_csv(r.locality));
    write_text((d / "config.echo").string(), r.config.echo());
}

std::string summarize(const AnalysisReport& r)
{
    std::ostringstream out;
    out << "source " << r.source_kind << ", T = " << num(r.T) << ", delta = " << num(r.config.delta)
        << ", C0 = " << num(r.C0) << "\n";
    out << "e0 = " << num(r.baseline.e0) << "  eps0 = " << num(r.baseline.eps0) << " +- " << num(r.baseline.eps0_err)
        << "  tau0 = " << (r.baseline.tau0 ? num(*r.baseline.tau0) : std::string("undefined")) << "\n";
    for (std::size_t i = 0; i < r.scales.size(); ++i) {
        const auto& s = r.scales[i];
        out << "R = " << num(s.R) << "  n = " << s.n << "  e_R = " << num(s.e) << "  Phi_R = " << num(s.flux)
            << "  eps_R = " << num(s.eps);
        if (i < r.lemma.size()) out << "  lemma " << (r.lemma[i].ok() ? "ok" : "FAILED");
        out << "\n";
    }
    const auto& v = r.verdict;
    out << "verdict (" << to_string(v.mode) << ", gamma = " << num(v.gamma) << "): ";
    if (v.vacuous) {
        out << "condition vacuous (eps0 <= quadrature error)\n";
    } else {
        out << (v.condition_holds ? "condition holds" : "condition fails") << ", tau0 = " << num(*v.tau0)
            << " vs gamma c R0 = " << num(v.threshold) << "; flux bounds "
            << (v.bounds_hold ? "hold" : "violated") << "\n";
    }
    out << "locality: " << (r.locality.all_hold ? "all pairs within bounds" : "some pairs outside bounds") << "\n";
    return out.str();
}

}  // namespace cascade
