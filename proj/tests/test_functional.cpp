#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "cascade/error.hpp"
#include "cascade/functional.hpp"
#include "cascade/generators.hpp"
#include "cascade/spectral.hpp"

using namespace cascade;

namespace {

constexpr double kPi = std::numbers::pi;

VectorField3 uniform_flow(const Grid3& g, const Vec3& v)
{
    VectorField3 f(g, TimeAxis::steady(1.0));
    for (std::size_t q = 0; q < g.size(); ++q) {
        f.u[3 * q] = v.x;
        f.u[3 * q + 1] = v.y;
        f.u[3 * q + 2] = v.z;
    }
    f.p.assign(g.size(), 0.0);
    return f;
}

Vec3 taylor_green(const Vec3& x)
{
    return {std::sin(x.x) * std::cos(x.y) * std::cos(x.z), -std::cos(x.x) * std::sin(x.y) * std::cos(x.z), 0.0};
}

// D(x) for the exact Taylor-Green field: rho(s) = C (1 - s^2)^3 with
// C = 315 / (64 pi), so grad(rho_eps)(y) = eps^-4 rho'(|y|/eps) y/|y|.
double dr_oracle(const Vec3& x, double eps)
{
    using GL = boost::math::quadrature::gauss<double, 30>;
    const double C = 315.0 / (64.0 * kPi);
    const Vec3 ux = taylor_green(x);
    const int n_az = 96;
    return GL::integrate(
        [&](double s) {
            const double drho = C * 3.0 * (1 - s * s) * (1 - s * s) * (-2.0 * s);
            const double polar = GL::integrate(
                [&](double mu) {
                    const double st = std::sqrt(1 - mu * mu);
                    double acc = 0.0;
                    for (int k = 0; k < n_az; ++k) {
                        const double ph = 2 * kPi * k / n_az;
                        const Vec3 yhat{st * std::cos(ph), st * std::sin(ph), mu};
                        const Vec3 du = taylor_green(x + yhat * (s * eps)) - ux;
                        acc += dot(yhat, du) * norm2(du);
                    }
                    return acc * 2 * kPi / n_az;
                },
                -1.0, 1.0);
            // eps^-4 rho' times r^2 dr = eps^3 s^2 ds.
            return 0.25 * drho * s * s * polar / eps;
        },
        0.0, 1.0);
}

}  // namespace

TEST_CASE("time weights: closed form on a steady axis, trapezoid otherwise")
{
    const TemporalCutoff eta(1.0, 0.5);
    const TimeWeights s = time_weights(eta, TimeAxis::steady(1.0));
    REQUIRE(s.value.size() == 1);
    CHECK(s.value[0] == eta.integral());
    CHECK(s.value_delta[0] == eta.integral_delta());
    CHECK(s.derivative[0] == 0.0);

    const TimeAxis ax(2.0, 401);
    const TimeWeights u = time_weights(eta, ax);
    double iv = 0.0, id = 0.0;
    for (int k = 0; k < 401; ++k) {
        iv += u.value[k];
        id += u.derivative[k];
    }
    CHECK(iv == doctest::Approx(eta.integral()).epsilon(1e-6));
    CHECK(std::abs(id) < 1e-6);
    CHECK_THROWS(time_weights(eta, TimeAxis(3.0, 5)));

    CHECK(sample_index(ax, 1.0) == 200);
    CHECK(sample_index(TimeAxis::steady(1.0), 0.3) == 0);
    CHECK_THROWS(sample_index(ax, 1.0025));
    CHECK_THROWS(sample_index(ax, 2.5));
}

TEST_CASE("zero field: every functional vanishes")
{
    const Grid3 g = make_grid(32, 2 * kPi);
    const VectorField3 z = gen_zero(g);
    const CutoffFunction phi(make_eta(1.0, 0.5), make_psi_interior({}, 1.0, g));
    CHECK(local_energy(z, phi, 1.0).value == 0.0);
    const FluxValue f = local_flux(z, phi, 1.0);
    CHECK(f.gradient.value == 0.0);
    CHECK(f.advective.value == 0.0);
    CHECK(anomalous_dissipation(z, phi).value == 0.0);
    CHECK(viscous_balance_residual(z, phi, 0.1) == 0.0);
}

TEST_CASE("local energy of a uniform flow against the radial integral")
{
    const Grid3 g = make_grid(96, 2 * kPi);
    const Vec3 v{0.6, -0.8, 0.0};
    const VectorField3 f = uniform_flow(g, v);
    const double R = 0.8;
    const SpatialCutoff psi = make_psi_interior({0.1, 0.05, -0.07}, R, g);
    const CutoffFunction phi(make_eta(1.0, 0.5), psi);
    const LocalFunctionalValue e = local_energy(f, phi, 1.0);

    // 1/2 |v|^2 int psi^delta = 1/2 4 pi int_0^2R S((2R - r)/R)^delta r^2 dr
    const SmoothStep S(6);
    const double radial = boost::math::quadrature::gauss<double, 40>::integrate(
        [&](double r) { return std::sqrt(S.value((2 * R - r) / R)) * r * r; }, R, 2 * R);
    const double exact = 0.5 * 4 * kPi * (R * R * R / 3.0 + radial);
    CHECK(e.value == doctest::Approx(exact).epsilon(1e-4));
    CHECK(std::abs(e.value - exact) <= e.error + 1e-12);
    const double ball = 4.0 / 3.0 * kPi * R * R * R;
    CHECK(e.value > 0.5 * ball);
    CHECK(e.value < 0.5 * 8 * ball);
}

TEST_CASE("uniform flow carries no net flux")
{
    const Grid3 g = make_grid(64, 2 * kPi);
    const VectorField3 f = uniform_flow(g, {1.0, 0.5, -0.25});
    const CutoffFunction phi(make_eta(1.0, 0.5), make_psi_interior({0.2, 0.0, 0.0}, 0.9, g));
    const FluxValue fl = local_flux(f, phi, 1.0);
    CHECK(std::abs(fl.gradient.value) <= fl.gradient.error + 1e-12);
    CHECK(std::abs(fl.advective.value) < 1e-12);
}

TEST_CASE("ABC: gradient and advective flux forms agree")
{
    const Grid3 g = make_grid(64, 2 * kPi);
    const VectorField3 abc = gen_abc(g, 1.0, 1.0, 1.0);
    const auto power = spectral::advective_power(abc, 0);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> c(-0.6, 0.6), r(0.5, 1.0);
    for (int i = 0; i < 4; ++i) {
        const CutoffFunction phi(make_eta(1.0, 0.5), make_psi_interior({c(rng), c(rng), c(rng)}, r(rng), g));
        const FluxValue a = local_flux(abc, power, phi, 1.0);
        const FluxValue b = local_flux(abc, phi, 1.0);
        CHECK(a.gradient.value == b.gradient.value);
        // Both forms vanish for ABC; what is left is quadrature error.
        CHECK(a.discrepancy < 1e-4);
        CHECK(std::abs(a.gradient.value) <= a.gradient.error);
    }
}

TEST_CASE("flux without an attached pressure solves for one")
{
    const Grid3 g = make_grid(32, 2 * kPi);
    const VectorField3 abc = gen_abc(g, 1.0, 1.0, 1.0);
    VectorField3 bare(abc.grid, abc.times);
    bare.u = abc.u;
    const CutoffFunction phi(make_eta(1.0, 0.5), make_psi_interior({}, 1.0, g));
    const FluxValue a = local_flux(abc, phi, 1.0);
    const FluxValue b = local_flux(bare, phi, 1.0);
    CHECK(b.gradient.value == doctest::Approx(a.gradient.value).epsilon(1e-10).scale(1.0));
    CHECK_THROWS_AS(anomalous_dissipation(bare, phi), PreconditionError);
}

TEST_CASE("viscous balance: nu = 0 is -epsilon; ABC viscous part is nu iint |u|^2 phi")
{
    const Grid3 g = make_grid(64, 2 * kPi);
    const VectorField3 abc = gen_abc(g, 1.0, 0.9, 0.7);
    const TemporalCutoff eta(1.0, 0.5);
    const SpatialCutoff psi = make_psi_interior({0.1, -0.2, 0.3}, 0.9, g);
    const CutoffFunction phi(eta, psi);
    const double eps = anomalous_dissipation(abc, phi).value;
    CHECK(viscous_balance_residual(abc, phi, 0.0) == -eps);

    // lap(1/2|u|^2) = |grad u|^2 + u . lap u and lap u = -u for ABC, so
    // <|grad u|^2, phi> - <1/2|u|^2, lap phi> = <|u|^2, phi>.
    double s = 0.0;
    for (int k = 0; k < g.n(); ++k)
        for (int j = 0; j < g.n(); ++j)
            for (int i = 0; i < g.n(); ++i) {
                const std::size_t q = g.index(i, j, k);
                const double* v = abc.u.data() + 3 * q;
                s += (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * psi.value(g.point(i, j, k));
            }
    const double oracle = eta.integral() * g.cell_volume() * s;
    for (double nu : {1e-3, 0.1}) {
        const double res = viscous_balance_residual(abc, phi, nu);
        CHECK((res + eps) / nu == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("amplitude scaling: energy ~ lambda^2, flux ~ lambda^3")
{
    const Grid3 g = make_grid(48, 2 * kPi);
    const VectorField3 a = gen_abc(g, 1.0, 0.5, 0.2);
    const VectorField3 b = gen_abc(g, 2.0, 1.0, 0.4);
    const CutoffFunction phi(make_eta(1.0, 0.5), make_psi_interior({0.3, 0.1, 0.0}, 0.8, g));
    CHECK(local_energy(b, phi, 1.0).value == doctest::Approx(4 * local_energy(a, phi, 1.0).value).epsilon(1e-12));
    const double fa = local_flux(a, phi, 1.0).gradient.value;
    const double fb = local_flux(b, phi, 1.0).gradient.value;
    CHECK(fb == doctest::Approx(8 * fa).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("serial and parallel functionals are bit-identical")
{
    const Grid3 g = make_grid(48, 2 * kPi);
    const VectorField3 a = gen_abc(g, 1.0, 0.5, 0.2);
    const CutoffFunction phi(make_eta(1.0, 0.5), make_psi_interior({0.3, 0.1, 0.0}, 0.8, g));
    const auto s = anomalous_parts(a, phi, kernels::Exec::serial);
    const auto p = anomalous_parts(a, phi, kernels::Exec::parallel);
    CHECK(s.total.value == p.total.value);
    CHECK(s.total.error == p.total.error);
}

TEST_CASE("trilinear interpolation hits the nodes and wraps periodically")
{
    const Grid3 g = make_grid(32, 2 * kPi);
    const VectorField3 tg = gen_taylor_green(g, 1.0);
    const Vec3 x = g.point(5, 17, 30);
    const Vec3 v = interpolate_velocity(tg, 0, x);
    const double* s = tg.u.data() + 3 * g.index(5, 17, 30);
    CHECK(v.x == doctest::Approx(s[0]).epsilon(1e-14).scale(1e-14));
    CHECK(v.y == doctest::Approx(s[1]).epsilon(1e-14).scale(1e-14));
    const Vec3 w = interpolate_velocity(tg, 0, x + Vec3{2 * kPi, -4 * kPi, 0});
    CHECK(w.x == doctest::Approx(v.x).epsilon(1e-12).scale(1e-12));
    const Vec3 y{0.123, -1.7, 2.9};
    const Vec3 e = taylor_green(y);
    CHECK(std::abs(interpolate_velocity(tg, 0, y).x - e.x) < 0.01);
}

TEST_CASE("log-log slope of an exact power law")
{
    const std::vector<double> x{1.0, 0.5, 0.25, 0.125};
    std::vector<double> y;
    for (double v : x) y.push_back(-3.0 * v * v);
    REQUIRE(loglog_slope(x, y).has_value());
    CHECK(*loglog_slope(x, y) == doctest::Approx(2.0));
    CHECK_FALSE(loglog_slope(x, std::vector<double>{0.0, 0.0, 0.0, 1.0}).has_value());
}

TEST_CASE("Duchon-Robert: zero and uniform flows give D = 0")
{
    const Grid3 g = make_grid(64, 2 * kPi);
    const std::vector<Vec3> pts{{0.1, 0.2, 0.3}, {-1.0, 2.0, 0.5}};
    const DRScan z = dr_scan(gen_zero(g), 1.0, pts, 1.0, 2);
    const DRScan u = dr_scan(uniform_flow(g, {1.0, 2.0, 3.0}), 1.0, pts, 1.0, 2);
    for (std::size_t k = 0; k < z.eps.size(); ++k) {
        CHECK(z.D_abs_max[k] == 0.0);
        CHECK(u.D_abs_max[k] < 1e-12);
    }
    CHECK(z.eps.size() == 3);
    CHECK(z.eps[2] == 0.25);
    CHECK_THROWS_AS(dr_scan(gen_zero(g), 1.0, pts, 0.5, 2), PreconditionError);
}

TEST_CASE("Duchon-Robert on Taylor-Green matches an exact-field quadrature")
{
    const Grid3 g = make_grid(128, 2 * kPi);
    const VectorField3 tg = gen_taylor_green(g, 1.0);
    const std::vector<Vec3> pts{{0.3, 0.7, 1.1}, {-1.2, 0.4, 2.0}};
    const DRScan s = dr_scan(tg, 1.0, pts, 0.8, 1);
    for (std::size_t k = 0; k < s.eps.size(); ++k) {
        for (std::size_t p = 0; p < pts.size(); ++p) {
            const double o = dr_oracle(pts[p], s.eps[k]);
            CHECK(s.D[k][p] == doctest::Approx(o).epsilon(2e-2));
        }
    }
    // Cubic in the amplitude.
    const DRScan s2 = dr_scan(gen_taylor_green(g, 2.0), 1.0, pts, 0.8, 1);
    CHECK(s2.D[0][0] == doctest::Approx(8 * s.D[0][0]).epsilon(1e-10));
}
