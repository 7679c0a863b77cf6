#pragma once

#include <cstdint>

#include "cascade/grid.hpp"

namespace cascade {

/// Arnold-Beltrami-Childress flow on the 2 pi box,
///   u = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x),
/// with p = -|u|^2 / 2 + (A^2 + B^2 + C^2) / 2 (zero mean). curl u = u, so the
/// pair is an exact steady Euler solution.
VectorField3 gen_abc(const Grid3& grid, double A, double B, double C, double T = 1.0);

/// u = amplitude (sin x cos y cos z, -cos x sin y cos z, 0). Divergence-free,
/// not an Euler solution; single snapshot, no pressure attached.
VectorField3 gen_taylor_green(const Grid3& grid, double amplitude, double T = 1.0);

/// Azimuthal swirl u = f(r) e_theta about the z axis through (0, 0).
/// f(r) = r^-alpha between r_core and the outer taper, a C^1 solid-body core
/// below r_core (when r_core > 0), and a smoothstep taper to zero on
/// [0.75 r_cut, r_cut]. Pressure solves p'(r) = f(r)^2 / r with p(r_cut) = 0,
/// which makes (u, p) an exact steady Euler solution for every r.
struct SwirlParams {
    double alpha = 0.4;
    double r_core = 0.0;
    double r_cut = 2.0;
};
VectorField3 gen_singular_swirl(const Grid3& grid, const SwirlParams& params, double T = 1.0);

/// Closed-form swirl profile, used by the generator and by test oracles.
class SwirlProfile {
public:
    explicit SwirlProfile(const SwirlParams& params);

    double speed(double r) const;     // f(r)
    double pressure(double r) const;  // p(r), p = 0 for r >= r_cut
    double taper_start() const { return r_taper_; }

private:
    double taper(double r) const;
    double annulus_integral(double a, double b) const;  // int_a^b f(s)^2 / s ds inside the taper

    SwirlParams params_;
    double r_taper_;
    double taper_total_;  // int_{r_taper}^{r_cut} f^2 / s ds
};

/// Zero velocity and zero pressure.
VectorField3 gen_zero(const Grid3& grid, double T = 1.0);

/// Sum of `blobs` Gaussian bumps with seeded centers inside B(0, center_radius),
/// widths in [0.15, 0.4] * center_radius and amplitudes in [0.2, 1], plus a
/// small positive floor. Smooth and strictly positive.
ScalarDensity gen_blob_density(const Grid3& grid, const TimeAxis& times, int blobs, double center_radius,
                               std::uint64_t seed);

/// Compactly supported bump around the z axis: (1 - (r/radius)^2)^3 for
/// r < radius times (1 - (z/half_length)^2)^3 for |z| < half_length, scaled
/// by `amplitude`. Steady in time (replicated over samples).
ScalarDensity gen_tube_density(const Grid3& grid, const TimeAxis& times, double radius, double half_length,
                               double amplitude = 1.0);

/// Constant density.
ScalarDensity gen_uniform_density(const Grid3& grid, const TimeAxis& times, double value);

}  // namespace cascade
