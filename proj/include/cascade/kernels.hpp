#pragma once

// Data-parallel kernels. Every kernel has an OpenMP path and a serial path
// that performs the same arithmetic in the same order; results are
// bit-identical for any thread count. Reductions go through fixed-shape
// partials (one per plane or per chunk) merged by tree_sum.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cascade/grid.hpp"

namespace cascade::kernels {

enum class Exec { serial, parallel };

/// Pairwise sum with a fixed split, independent of threading.
double tree_sum(std::span<const double> values);

/// Number of OpenMP threads a parallel region would use.
int max_threads();

/// Runs fn(c) for c in [0, count). Parallel uses a static schedule; fn must
/// only write to slot c of its outputs.
template <class Fn>
void for_each_chunk(Exec exec, std::ptrdiff_t count, Fn&& fn)
{
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < count; ++c) fn(c);
    } else {
        for (std::ptrdiff_t c = 0; c < count; ++c) fn(c);
    }
}

/// Sum over a grid of a[i] * b[i], reduced plane by plane.
double weighted_sum(Exec exec, const Grid3& grid, std::span<const double> a, std::span<const double> b);

/// Samples of a cutoff on the grid nodes of its support bounding box. The
/// box never wraps: lo + count stays inside [0, n).
struct CutoffPatch {
    std::array<int, 3> lo{};
    std::array<int, 3> count{};
    std::vector<double> psi;
    std::vector<double> psi_delta;  // psi^delta, when requested
    std::vector<double> grad;       // 3 per node, when requested
    std::vector<double> lap;        // when requested

    std::size_t size() const
    {
        return static_cast<std::size_t>(count[0]) * count[1] * count[2];
    }
    std::size_t local_index(int a, int b, int c) const
    {
        return (static_cast<std::size_t>(c) * count[1] + b) * count[0] + a;
    }
};

/// Raw node sums of an integrand over a patch. `fine` is the full sum,
/// `coarse` the sum over nodes with all-even global indices (a 2h subgrid),
/// `magnitude` the sum of |term| factor magnitudes for roundoff bounds.
struct PatchSum {
    double fine = 0.0;
    double coarse = 0.0;
    double magnitude = 0.0;
};

namespace detail {

template <class Integrand>
PatchSum plane_sum(const Grid3& grid, const CutoffPatch& patch, int c, Integrand& term)
{
    PatchSum s;
    const int kz = patch.lo[2] + c;
    const bool z_even = (kz % 2) == 0;
    for (int b = 0; b < patch.count[1]; ++b) {
        const int jy = patch.lo[1] + b;
        const bool yz_even = z_even && (jy % 2) == 0;
        const std::size_t row_field = grid.index(patch.lo[0], jy, kz);
        const std::size_t row_local = patch.local_index(0, b, c);
        for (int a = 0; a < patch.count[0]; ++a) {
            double mag = 0.0;
            const double v = term(row_field + a, row_local + a, mag);
            s.fine += v;
            s.magnitude += mag;
            if (yz_even && ((patch.lo[0] + a) % 2) == 0) s.coarse += v;
        }
    }
    return s;
}

PatchSum merge_planes(std::span<const PatchSum> planes);

}  // namespace detail

/// Sums an integrand over one patch. Plane partials are merged by tree_sum,
/// so serial and parallel paths agree bit for bit.
template <class Integrand>
PatchSum pair(Exec exec, const Grid3& grid, const CutoffPatch& patch, Integrand term)
{
    std::vector<PatchSum> planes(patch.count[2]);
    for_each_chunk(exec, patch.count[2], [&](std::ptrdiff_t c) {
        Integrand local = term;
        planes[c] = detail::plane_sum(grid, patch, static_cast<int>(c), local);
    });
    return detail::merge_planes(planes);
}

/// Same integrand family over many patches; parallelism is across patches.
template <class MakeIntegrand>
std::vector<PatchSum> pair_many(Exec exec, const Grid3& grid, std::span<const CutoffPatch> patches,
                                MakeIntegrand make)
{
    std::vector<PatchSum> out(patches.size());
    for_each_chunk(exec, static_cast<std::ptrdiff_t>(patches.size()), [&](std::ptrdiff_t i) {
        out[i] = pair(Exec::serial, grid, patches[i], make(patches[i]));
    });
    return out;
}

// Integrands. Each returns the node value and writes a magnitude bound.

/// f(x) * w(x) for a scalar field slice and a patch weight array.
struct ScalarTerm {
    const double* f;
    const double* w;
    double operator()(std::size_t q, std::size_t l, double& mag) const
    {
        const double v = f[q] * w[l];
        mag = std::abs(v);
        return v;
    }
};

/// 1/2 |u|^2 w(x).
struct EnergyTerm {
    const double* u;
    const double* w;
    double operator()(std::size_t q, std::size_t l, double& mag) const
    {
        const double* v = u + 3 * q;
        const double e = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        const double r = e * w[l];
        mag = std::abs(r);
        return r;
    }
};

/// (1/2 |u|^2 + p) u . grad(psi).
struct FluxTerm {
    const double* u;
    const double* p;
    const double* grad;
    double operator()(std::size_t q, std::size_t l, double& mag) const
    {
        const double* v = u + 3 * q;
        const double* g = grad + 3 * l;
        const double bern = 0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) + p[q];
        const double ug = v[0] * g[0] + v[1] * g[1] + v[2] * g[2];
        mag = std::abs(bern) * std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) *
              std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        return bern * ug;
    }
};

}  // namespace cascade::kernels
