// Batch front end: gen, cover, analyze, dr, tube, locality.
// Exit codes: 0 success, 2 bad generator or parameters, 3 infeasible cover,
// 4 analysis failure, 5 scan failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cascade/cover.hpp"
#include "cascade/cutoff.hpp"
#include "cascade/ensemble.hpp"
#include "cascade/error.hpp"
#include "cascade/field_io.hpp"
#include "cascade/functional.hpp"
#include "cascade/generators.hpp"
#include "cascade/report.hpp"
#include "cascade/spectral.hpp"

namespace {

using namespace cascade;

enum Exit { kOk = 0, kBadGenerator = 2, kInfeasibleCover = 3, kAnalysisFailed = 4, kScanFailed = 5 };

struct GenOptions {
    std::string generator;
    std::string out;
    int n = 64;
    double box = 2.0 * std::numbers::pi;
    double T = 1.0;
    double A = 1.0, B = 1.0, C = 1.0;
    double amplitude = 1.0;
    double alpha = 0.4, r_core = 0.0, r_cut = 2.0;
    int samples = 1;
    int blobs = 6;
    double center_radius = 1.0;
    std::uint64_t seed = 1;
    double radius = 0.05, half_length = 0.1, value = 1.0;
};

struct CoverCmd {
    double R0 = 1.0, R = 1.0;
    int K1 = 20, K2 = 40;
    double jitter = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_probe = 100000;
    std::string out;
};

struct DrCmd {
    std::string field, out;
    double t = -1.0;
    std::vector<std::string> points;
    int n_points = 8;
    std::uint64_t seed = 1;
    double eps_max = 0.0;
    int k_max = 3;
    DRStencil stencil;
};

struct TubeCmd {
    std::string field, density, out;
    std::vector<double> radii;
    double delta = 0.5;
};

struct LocalityCmd {
    std::string report, out;
    double gamma = -1.0;
    std::string mode;
};

double max_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Largest |(u . grad) u + grad p| over nodes farther than `exclude` from the z axis.
double max_momentum_residual(const VectorField3& f, double exclude)
{
    double m = 0.0;
    for (int t = 0; t < f.times.n_samples(); ++t) {
        const auto r = spectral::momentum_residual(f, t);
        const int n = f.grid.n();
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const Vec3 x = f.grid.point(i, j, k);
                    if (std::hypot(x.x, x.y) < exclude) continue;
                    const double* v = r.data() + 3 * f.grid.index(i, j, k);
                    m = std::max(m, std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
                }
    }
    return m;
}

int run_gen(const GenOptions& o)
{
    try {
        const TimeAxis times(2.0 * o.T, o.samples);
        const auto write_scalar = [&](const ScalarDensity& d) {
            write_density(d.field(), o.out);
            std::cout << "wrote " << o.out << " (" << o.generator << ", n = " << o.n << ", samples = " << o.samples
                      << ")\n";
            return kOk;
        };
        if (o.generator == "blobs") {
            return write_scalar(gen_blob_density(make_grid(o.n, o.box), times, o.blobs, o.center_radius, o.seed));
        }
        if (o.generator == "tube") {
            return write_scalar(gen_tube_density(make_grid(o.n, o.box), times, o.radius, o.half_length, o.value));
        }
        if (o.generator == "uniform") return write_scalar(gen_uniform_density(make_grid(o.n, o.box), times, o.value));

        std::optional<VectorField3> f;
        double exclude = 0.0;
        if (o.generator == "abc") {
            f = gen_abc(make_grid(o.n, o.box), o.A, o.B, o.C, o.T);
        } else if (o.generator == "taylor-green") {
            f = gen_taylor_green(make_grid(o.n, o.box), o.amplitude, o.T);
        } else if (o.generator == "swirl") {
            const Grid3 g = o.r_core == 0.0 ? make_axis_offset_grid(o.n, o.box) : make_grid(o.n, o.box);
            f = gen_singular_swirl(g, {o.alpha, o.r_core, o.r_cut}, o.T);
            exclude = 3.0 * g.spacing();
        } else if (o.generator == "zero") {
            f = gen_zero(make_grid(o.n, o.box), o.T);
        } else {
            std::cerr << "error: unknown generator '" << o.generator
                      << "' (abc | taylor-green | swirl | zero | blobs | tube | uniform)\n";
            return kBadGenerator;
        }
        write_field(*f, o.out);

        double div = 0.0;
        for (int t = 0; t < f->times.n_samples(); ++t) div = std::max(div, max_abs(spectral::divergence(*f, t)));
        const VectorField3 with_p = f->has_pressure() ? *f : spectral::solve_pressure(*f);
        std::cout << "wrote " << o.out << " (" << o.generator << ", n = " << o.n
                  << (f->has_pressure() ? ", with pressure" : "") << ")\n"
                  << "max |div u| = " << div << "\n"
                  << "max |u . grad u + grad p| = " << max_momentum_residual(with_p, exclude)
                  << (f->has_pressure() ? "" : " (spectral pressure)")
                  << (exclude > 0.0 ? " (3h of the axis excluded)" : "") << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kBadGenerator;
    }
}

int run_cover(const CoverCmd& o)
{
    try {
        CoverOptions opts;
        opts.jitter = o.jitter;
        opts.seed = o.seed;
        opts.n_probe = o.n_probe;
        const Cover c = generate_cover(o.R0, o.R, o.K1, o.K2, opts);
        if (!o.out.empty()) write_cover(c, o.out);
        const CoverReport& r = c.verification;
        std::cout << "n = " << c.n() << " in [" << c.n_lower() << ", " << c.n_upper() << "]"
                  << (r.n_ok ? "" : " (VIOLATED)") << "\n"
                  << "coverage " << (r.coverage_ok ? "ok" : "FAILED") << " on " << r.n_probe << " probes\n"
                  << "multiplicity_max = " << r.multiplicity_max << " (K2 = " << c.K2 << ")\n"
                  << "verified = " << (c.verified ? "true" : "false") << "\n";
        return kOk;
    } catch (const InfeasibleCover& e) {
        std::cerr << "error: " << e.what() << " (achieved n = " << e.achieved_n()
                  << ", multiplicity = " << e.achieved_multiplicity() << ")\n";
        return kInfeasibleCover;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInfeasibleCover;
    }
}

int run_analyze(const AnalysisConfig& cfg, const std::string& out_dir)
{
    try {
        const auto start = std::chrono::steady_clock::now();
        const AnalysisReport rep = run_analysis(cfg);
        write_analysis(rep, out_dir);
        std::cout << summarize(rep);
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        std::cerr << "wall-clock " << wall.count() << " s, report in " << out_dir << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: analysis failed: " << e.what() << "\n";
        return kAnalysisFailed;
    }
}

Vec3 parse_point(const std::string& s)
{
    std::istringstream in(s);
    Vec3 p;
    char c1 = 0, c2 = 0;
    if (!(in >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',') {
        throw PreconditionError("point '" + s + "' is not of the form x,y,z");
    }
    return p;
}

int run_dr(const DrCmd& o)
{
    try {
        const VectorField3 f = read_field(o.field);
        const double h = f.grid.spacing();
        std::vector<Vec3> pts;
        for (const auto& s : o.points) pts.push_back(parse_point(s));
        if (pts.empty()) {
            std::mt19937_64 rng(o.seed);
            std::uniform_real_distribution<double> u(0.0, f.grid.box_length());
            for (int i = 0; i < o.n_points; ++i) pts.push_back(f.grid.origin() + Vec3{u(rng), u(rng), u(rng)});
        }
        const double t = o.t > 0.0 ? o.t : f.times.T();
        const double eps_max = o.eps_max > 0.0 ? o.eps_max : 64.0 * h;
        const DRScan s = dr_scan(f, t, pts, eps_max, o.k_max, o.stencil);
        const std::string table = dr_csv(s);
        if (!o.out.empty()) write_text(o.out, table);
        std::cout << table << "slope = " << (s.slope ? std::to_string(*s.slope) : std::string("undefined")) << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: dr scan failed: " << e.what() << "\n";
        return kScanFailed;
    }
}

int run_tube(const TubeCmd& o)
{
    try {
        if (o.field.empty() == o.density.empty()) throw PreconditionError("tube needs exactly one of --field or --density");
        TubeScan s;
        if (!o.field.empty()) {
            VectorField3 f = read_field(o.field);
            if (!f.has_pressure()) f = spectral::solve_pressure(std::move(f));
            s = tube_constancy_scan(f, o.radii, make_eta(f.times.T(), o.delta));
        } else {
            const ScalarDensity d = read_density(o.density);
            s = tube_constancy_scan(d, o.radii, make_eta(d.times().T(), o.delta));
        }
        const std::string table = tube_csv(s);
        if (!o.out.empty()) write_text(o.out, table);
        std::cout << table << "max deviation = " << s.max_deviation << " (relative " << s.relative_deviation
                  << "), quadrature estimate = " << s.estimate << (s.within_estimate ? ", within" : ", EXCEEDED")
                  << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: tube scan failed: " << e.what() << "\n";
        return kScanFailed;
    }
}

int run_locality(const LocalityCmd& o)
{
    try {
        std::ifstream in(o.report);
        if (!in) throw Error("cannot open report '" + o.report + "'");
        const auto j = nlohmann::json::parse(in);
        std::vector<ScaleReport> scales;
        for (const auto& s : j.at("scales")) scales.push_back(scale_report_from_json(s));
        const Baseline base = baseline_from_json(j.at("baseline"));
        const auto& v = j.at("verdict");
        const double gamma = o.gamma > 0.0 ? o.gamma : v.at("gamma").get<double>();
        const ConstantsMode mode = parse_constants_mode(o.mode.empty() ? v.at("mode").get<std::string>() : o.mode);
        const CascadeVerdict verdict = cascade_verdict(base, scales, gamma, v.at("K1").get<int>(),
                                                       v.at("K2").get<int>(), j.at("C0").get<double>(), mode);
        const LocalityReport l = locality_ratios(scales, verdict.constants);
        const std::string table = locality_csv(l);
        if (!o.out.empty()) write_text(o.out, table);
        std::cout << table << "c0 = " << verdict.constants.c0 << ", c1 = " << verdict.constants.c1
                  << (l.all_hold ? ", all pairs within bounds" : ", some pairs outside bounds") << "\n";
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: locality failed: " << e.what() << "\n";
        return kAnalysisFailed;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Physical-space energy-cascade diagnostics for 3D velocity fields"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "key=value file with one [command] section per subcommand; "
                                   "the config.echo written by analyze reproduces that run");

    GenOptions gen;
    auto* g = app.add_subcommand("gen", "Synthesize a velocity field or scalar density file");
    g->add_option("--generator", gen.generator, "abc | taylor-green | swirl | zero | blobs | tube | uniform")->required();
    g->add_option("--out", gen.out, "Output file")->required();
    g->add_option("--n", gen.n, "Grid points per axis");
    g->add_option("--box", gen.box, "Box length");
    g->add_option("--T", gen.T, "Half the time window (0, 2T)");
    g->add_option("--A", gen.A);
    g->add_option("--B", gen.B);
    g->add_option("--C", gen.C);
    g->add_option("--amplitude", gen.amplitude, "Taylor-Green amplitude");
    g->add_option("--alpha", gen.alpha, "Swirl exponent");
    g->add_option("--r-core", gen.r_core, "Swirl core radius (0: raw singular profile)");
    g->add_option("--r-cut", gen.r_cut, "Swirl outer cutoff radius");
    g->add_option("--samples", gen.samples, "Time samples of a density");
    g->add_option("--blobs", gen.blobs, "Number of Gaussian blobs");
    g->add_option("--center-radius", gen.center_radius, "Blob centers lie in B(0, center-radius)");
    g->add_option("--seed", gen.seed);
    g->add_option("--radius", gen.radius, "Tube density radius");
    g->add_option("--half-length", gen.half_length, "Tube density half length");
    g->add_option("--value", gen.value, "Tube amplitude or uniform value");

    CoverCmd cov;
    auto* c = app.add_subcommand("cover", "Generate and verify a (K1, K2)-cover");
    c->add_option("--R0", cov.R0);
    c->add_option("--R", cov.R)->required();
    c->add_option("--K1", cov.K1);
    c->add_option("--K2", cov.K2);
    c->add_option("--jitter", cov.jitter);
    c->add_option("--seed", cov.seed);
    c->add_option("--n-probe", cov.n_probe);
    c->add_option("--out", cov.out, "Cover file");

    AnalysisConfig cfg;
    std::string out_dir = "analysis";
    auto* a = app.add_subcommand("analyze", "Ensemble averages, cascade verdict and locality table");
    a->add_option("--field", cfg.field, "Velocity field file");
    a->add_option("--density", cfg.density, "Dissipation density file");
    a->add_option("--energy", cfg.energy, "Energy density file paired with --density");
    a->add_option("--R0", cfg.R0);
    a->add_option("--delta", cfg.delta);
    a->add_option("--gamma", cfg.gamma);
    a->add_option("--K1", cfg.K1);
    a->add_option("--K2", cfg.K2);
    a->add_option("--k-min", cfg.k_min, "Smallest scale R0 2^k-min");
    a->add_option("--k-max", cfg.k_max, "Largest scale R0 2^k-max");
    a->add_option("--seed", cfg.seed);
    a->add_option("--jitter", cfg.jitter);
    a->add_option("--n-probe", cfg.n_probe);
    a->add_option("--mode", cfg.mode, "as-derived | as-printed");
    a->add_option("--out-dir", out_dir);

    DrCmd dr;
    auto* d = app.add_subcommand("dr", "Duchon-Robert mollifier scan");
    d->add_option("--field", dr.field)->required();
    d->add_option("--t", dr.t, "Sample time (default T)");
    d->add_option("--point", dr.points, "x,y,z (repeatable)");
    d->add_option("--n-points", dr.n_points, "Seeded random points when no --point is given");
    d->add_option("--seed", dr.seed);
    d->add_option("--eps-max", dr.eps_max, "Largest mollifier radius (default 64h)");
    d->add_option("--k-max", dr.k_max);
    d->add_option("--radial", dr.stencil.radial);
    d->add_option("--polar", dr.stencil.polar);
    d->add_option("--azimuthal", dr.stencil.azimuthal);
    d->add_option("--out", dr.out, "CSV table");

    TubeCmd tube;
    auto* t = app.add_subcommand("tube", "Concentric-ball constancy scan");
    t->add_option("--field", tube.field);
    t->add_option("--density", tube.density);
    t->add_option("--radii", tube.radii)->required();
    t->add_option("--delta", tube.delta);
    t->add_option("--out", tube.out, "CSV table");

    LocalityCmd loc;
    auto* l = app.add_subcommand("locality", "Locality table from an analysis report");
    l->add_option("--report", loc.report, "report.json")->required();
    l->add_option("--gamma", loc.gamma);
    l->add_option("--mode", loc.mode);
    l->add_option("--out", loc.out, "CSV table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadGenerator;
    }

    if (g->parsed()) return run_gen(gen);
    if (c->parsed()) return run_cover(cov);
    if (a->parsed()) return run_analyze(cfg, out_dir);
    if (d->parsed()) return run_dr(dr);
    if (t->parsed()) return run_tube(tube);
    return run_locality(loc);
}
