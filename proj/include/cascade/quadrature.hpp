#pragma once

#include <cstddef>

#include "cascade/grid.hpp"
#include "cascade/kernels.hpp"

namespace cascade {

/// Midpoint rule in space, trapezoid in time. A steady (single-sample) time
/// axis contributes its full length 2T as the time weight.
/// Deterministic: plane partials are merged by a fixed tree.
double integrate(const ScalarField& values, const ScalarField& weight,
                 kernels::Exec exec = kernels::Exec::parallel);

/// Pointwise 1/2 |u|^2 of a velocity field.
ScalarField kinetic_energy_density(const VectorField3& field);

/// Value and error estimate of a node sum scaled by h^3 * time_factor.
/// The estimate is |S_h - S_2h| plus a roundoff bound proportional to the
/// summed term magnitudes.
struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};
QuadratureResult scale_patch_sum(const kernels::PatchSum& sum, double cell_volume, double time_factor,
                                 std::size_t nodes);

}  // namespace cascade
