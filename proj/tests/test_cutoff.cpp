#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cascade/cutoff.hpp"
#include "cascade/error.hpp"

using namespace cascade;

namespace {

// Composite Simpson on [a, b], n even.
template <class F>
double simpson(F f, double a, double b, int n)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("temporal cutoff: support, plateau, exponent")
{
    const TemporalCutoff eta(1.0, 0.5);
    CHECK(eta.m() == 3);
    CHECK(eta.value(0.0) == 0.0);
    CHECK(eta.value(2.0) == 0.0);
    CHECK(eta.value(-0.1) == 0.0);
    CHECK(eta.value(0.5) == 1.0);
    CHECK(eta.value(1.2) == 1.0);
    CHECK(eta.derivative(0.7) == 0.0);
    CHECK(TemporalCutoff(1.0, 0.8).m() == 6);
    CHECK_THROWS_AS(TemporalCutoff(1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(TemporalCutoff(-1.0, 0.5), PreconditionError);
}

TEST_CASE("temporal cutoff integrals match Simpson")
{
    for (double T : {0.5, 1.0, 3.0}) {
        const TemporalCutoff eta(T, 0.5);
        const auto v = [&](double t) { return eta.value(t); };
        const auto vd = [&](double t) { return eta.value_delta(t); };
        const auto d = [&](double t) { return eta.derivative(t); };
        CHECK(eta.integral() == doctest::Approx(simpson(v, 0.0, 2 * T, 4000)).epsilon(1e-10));
        CHECK(eta.integral_delta() == doctest::Approx(simpson(vd, 0.0, 2 * T, 4000)).epsilon(1e-10));
        CHECK(std::abs(simpson(d, 0.0, 2 * T, 4000)) < 1e-9);
    }
}

TEST_CASE("derivative agrees with finite differences")
{
    const TemporalCutoff eta(1.0, 0.5);
    for (double t : {0.05, 0.13, 0.22, 1.3, 1.6, 1.9}) {
        const double h = 1e-6;
        const double fd = (eta.value(t + h) - eta.value(t - h)) / (2 * h);
        CHECK(eta.derivative(t) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("C0 dominates T |eta'| / eta^delta on an independent sample")
{
    for (double delta : {0.3, 0.5, 0.75}) {
        for (double T : {0.5, 2.0}) {
            const TemporalCutoff eta(T, delta);
            double sup = 0.0;
            for (int i = 1; i < 20011; ++i) {
                const double t = 2 * T * i / 20011.0;
                const double v = eta.value(t);
                if (v > 0.0) sup = std::max(sup, T * std::abs(eta.derivative(t)) / std::pow(v, delta));
            }
            CHECK(sup <= eta.C0());
            CHECK(sup == doctest::Approx(eta.sampled_sup()).epsilon(1e-3));
            // C0 is a property of the profile: independent of T.
            CHECK(eta.C0() == doctest::Approx(TemporalCutoff(1.0, delta).C0()).epsilon(1e-6));
            CHECK(eta.ratio(1e-4 * T) < eta.ratio(0.1 * T));
        }
    }
}

TEST_CASE("interior cutoff: 1 on B(x0,R), 0 outside B(x0,2R), smooth in between")
{
    const Grid3 g = make_grid(64, 2 * std::numbers::pi);
    const Vec3 x0{0.3, -0.2, 0.1};
    const SpatialCutoff psi = make_psi_interior(x0, 0.5, g);
    CHECK(psi.value(x0) == 1.0);
    CHECK(psi.value(x0 + Vec3{0.49, 0, 0}) == 1.0);
    CHECK(psi.value(x0 + Vec3{0, 1.01, 0}) == 0.0);
    const double mid = psi.value(x0 + Vec3{0, 0, 0.75});
    CHECK(mid == doctest::Approx(0.5));

    const double h = 1e-5;
    for (const Vec3& x : {x0 + Vec3{0.3, 0.4, 0.2}, x0 + Vec3{-0.5, 0.3, -0.4}, x0 + Vec3{0.1, -0.6, 0.55}}) {
        const Vec3 gr = psi.gradient(x);
        double lap = 0.0;
        for (int a = 0; a < 3; ++a) {
            Vec3 e{};
            e[a] = h;
            const double fd = (psi.value(x + e) - psi.value(x - e)) / (2 * h);
            CHECK(gr[a] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
            lap += (psi.value(x + e) - 2 * psi.value(x) + psi.value(x - e)) / (h * h);
        }
        CHECK(psi.laplacian(x) == doctest::Approx(lap).epsilon(1e-3).scale(1.0));
    }
}

TEST_CASE("cutoffs at or below 4h are rejected for fields")
{
    const Grid3 g = make_grid(32, 2 * std::numbers::pi);
    const double h = g.spacing();
    CHECK_THROWS_AS(make_psi_interior({}, 4 * h, g), PreconditionError);
    CHECK_NOTHROW(make_psi_interior({}, 4 * h, g, false));
    CHECK_NOTHROW(make_psi_interior({}, 4.5 * h, g));
    // Support B(0, 2R) must fit without wrap.
    CHECK_THROWS(make_psi_interior({}, 2.0, g).sample(g, {}));
}

TEST_CASE("boundary cone cutoff agrees with psi0 on the cone patch")
{
    const Grid3 g = make_grid(128, 2 * std::numbers::pi);
    const double R0 = 1.0, R = 0.25;
    const Vec3 x0{0.9, 0.0, 0.0};
    const SpatialCutoff psi = make_psi_for_ball(x0, R, R0, g);
    CHECK(psi.kind() == CutoffKind::boundary_cone);
    CHECK(make_psi_for_ball({0.5, 0, 0}, R, R0, g).kind() == CutoffKind::interior);

    // Inside B(0, R0) and B(x0, R): 1.
    CHECK(psi.value({0.8, 0.05, 0.0}) == 1.0);
    // Outside B(0, R0), radially above a point of B(x0, R): equals psi0.
    for (double r : {1.05, 1.3, 1.6, 1.95}) {
        const Vec3 x{r, 0.02, -0.01};
        CHECK(psi.value(x) == doctest::Approx(psi.psi0(x)).epsilon(1e-14));
    }
    // Never exceeds psi0.
    for (int i = 0; i < 50; ++i) {
        const Vec3 x{0.5 + 0.03 * i, 0.4 * std::sin(i), 0.3 * std::cos(1.7 * i)};
        CHECK(psi.value(x) <= psi.psi0(x) + 1e-15);
    }
    CHECK_THROWS(psi.laplacian({1.1, 0, 0}));
}

TEST_CASE("sampled phi obeys the time-derivative bound")
{
    const Grid3 g = make_grid(32, 2 * std::numbers::pi);
    const TimeAxis times(2.0, 41);
    for (double delta : {0.4, 0.5, 0.7}) {
        const CutoffFunction phi(make_eta(1.0, delta), make_psi_interior({}, 1.0, g));
        CHECK(phi.time_bound_violation(g, times) <= 0.0);
        CHECK(phi.phi_delta(1.0, {}) == 1.0);
    }
}

TEST_CASE("patch sampling matches pointwise evaluation, serial and parallel alike")
{
    const Grid3 g = make_grid(48, 2 * std::numbers::pi);
    const SpatialCutoff psi = make_psi_interior({0.2, 0.1, -0.3}, 0.7, g);
    SampleRequest req;
    req.psi_delta = true;
    req.gradient = true;
    req.laplacian = true;
    const auto a = psi.sample(g, req, kernels::Exec::serial);
    const auto b = psi.sample(g, req, kernels::Exec::parallel);
    CHECK(a.psi == b.psi);
    CHECK(a.grad == b.grad);
    CHECK(a.lap == b.lap);
    const int c0 = a.count[0] / 2, c1 = a.count[1] / 3, c2 = a.count[2] / 2;
    const Vec3 x = g.point(a.lo[0] + c0, a.lo[1] + c1, a.lo[2] + c2);
    const std::size_t l = a.local_index(c0, c1, c2);
    CHECK(a.psi[l] == psi.value(x));
    CHECK(a.psi_delta[l] == doctest::Approx(std::pow(psi.value(x), 0.5)));
    CHECK(a.grad[3 * l + 1] == psi.gradient(x).y);
}
