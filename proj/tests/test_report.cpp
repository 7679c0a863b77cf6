#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cascade/error.hpp"
#include "cascade/field_io.hpp"
#include "cascade/generators.hpp"
#include "cascade/report.hpp"

using namespace cascade;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct DensityFixture {
    fs::path dir = fs::temp_directory_path() / "cascade_report_test";
    std::string density;

    DensityFixture()
    {
        fs::create_directories(dir);
        density = (dir / "blobs.csd").string();
        const ScalarDensity d =
            gen_blob_density(make_grid(48, 2 * std::numbers::pi), TimeAxis(2.0, 5), 4, 1.0, 2);
        write_density(d.field(), density);
    }
    ~DensityFixture() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("config echo lists every key once")
{
    AnalysisConfig c;
    c.density = "d.csd";
    c.R0 = 0.75;
    c.k_min = -2;
    const std::string e = c.echo();
    CHECK(e.rfind("[analyze]\n", 0) == 0);
    CHECK(e.find("density=d.csd\n") != std::string::npos);
    CHECK(e.find("R0=0.75\n") != std::string::npos);
    CHECK(e.find("k-min=-2\n") != std::string::npos);
    CHECK(e.find("field=") == std::string::npos);
    CHECK(e.find("mode=as-derived\n") != std::string::npos);
}

TEST_CASE("analysis of a density: tables, json and determinism")
{
    DensityFixture fx;
    AnalysisConfig c;
    c.density = fx.density;
    c.k_min = -2;
    c.seed = 3;
    const AnalysisReport a = run_analysis(c, kernels::Exec::serial);
    const AnalysisReport b = run_analysis(c, kernels::Exec::parallel);
    CHECK(to_json(a).dump() == to_json(b).dump());

    REQUIRE(a.scales.size() == 2);
    CHECK(a.scales[0].R == 0.5);
    CHECK(a.lemma.size() == 2);
    for (const auto& l : a.lemma) CHECK(l.ok());
    CHECK(a.source_kind == "density");

    const nlohmann::json j = to_json(a);
    CHECK(j["tool"] == kToolVersion);
    CHECK(j["config"]["seed"] == "3");
    CHECK(j["scales"].size() == 2);
    CHECK(j["scales"][0].contains("lemma"));
    CHECK(scale_report_from_json(j["scales"][1]).eps == a.scales[1].eps);
    CHECK(baseline_from_json(j["baseline"]).eps0 == a.baseline.eps0);

    const fs::path out = fx.dir / "out";
    write_analysis(a, out.string());
    for (const char* f : {"report.json", "scales.csv", "locality.csv", "config.echo"}) CHECK(fs::exists(out / f));
    CHECK(slurp(out / "config.echo") == c.echo());
    const std::string csv = slurp(out / "scales.csv");
    CHECK(csv.rfind("R,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK_FALSE(summarize(a).empty());
}

TEST_CASE("analysis rejects inconsistent inputs")
{
    AnalysisConfig none;
    CHECK_THROWS_AS(run_analysis(none), PreconditionError);
    AnalysisConfig both;
    both.field = "a";
    both.density = "b";
    CHECK_THROWS_AS(run_analysis(both), PreconditionError);
    AnalysisConfig lonely;
    lonely.field = "a";
    lonely.energy = "e";
    CHECK_THROWS_AS(run_analysis(lonely), PreconditionError);

    DensityFixture fx;
    AnalysisConfig mode;
    mode.density = fx.density;
    mode.mode = "sideways";
    CHECK_THROWS_AS(run_analysis(mode), PreconditionError);
}

TEST_CASE("csv tables are flat with a header")
{
    TubeScan s;
    s.radii = {0.2, 0.3};
    s.eps = {1.0, 1.0};
    s.err = {1e-3, 2e-3};
    const std::string t = tube_csv(s);
    CHECK(std::count(t.begin(), t.end(), '\n') == 3);
    CHECK(t.find("0.20000000000000001") != std::string::npos);
}
