#include "cascade/quadrature.hpp"

#include <cmath>
#include <limits>

#include "cascade/error.hpp"

namespace cascade {

double integrate(const ScalarField& values, const ScalarField& weight, kernels::Exec exec)
{
    if (!(values.grid == weight.grid) || !(values.times == weight.times)) {
        throw PreconditionError("integrate: shape mismatch between values and weight");
    }
    const auto tw = values.times.trapezoid_weights();
    std::vector<double> per_time(tw.size());
    for (std::size_t t = 0; t < tw.size(); ++t) {
        per_time[t] = tw[t] * kernels::weighted_sum(exec, values.grid, values.slice(static_cast<int>(t)),
                                                    weight.slice(static_cast<int>(t)));
    }
    return kernels::tree_sum(per_time) * values.grid.cell_volume();
}

ScalarField kinetic_energy_density(const VectorField3& field)
{
    ScalarField e(field.grid, field.times);
    for (std::size_t q = 0; q < e.data.size(); ++q) {
        const double* v = field.u.data() + 3 * q;
        e.data[q] = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    return e;
}

QuadratureResult scale_patch_sum(const kernels::PatchSum& sum, double cell_volume, double time_factor,
                                 std::size_t nodes)
{
    const double scale = cell_volume * time_factor;
    const double eps = std::numeric_limits<double>::epsilon();
    const double roundoff = eps * (std::log2(static_cast<double>(nodes) + 1.0) + 16.0) * sum.magnitude;
    QuadratureResult r;
    r.value = sum.fine * scale;
    r.error = (std::abs(sum.fine - 8.0 * sum.coarse) + roundoff) * std::abs(scale);
    return r;
}

}  // namespace cascade
