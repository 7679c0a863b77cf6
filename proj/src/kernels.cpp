#include "cascade/kernels.hpp"

#include <omp.h>

#include "cascade/error.hpp"

namespace cascade::kernels {

namespace {

constexpr std::size_t kLeaf = 32;

double tree_sum_range(const double* v, std::size_t n)
{
    if (n <= kLeaf) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return tree_sum_range(v, half) + tree_sum_range(v + half, n - half);
}

}  // namespace

double tree_sum(std::span<const double> values) { return tree_sum_range(values.data(), values.size()); }

int max_threads() { return omp_get_max_threads(); }

double weighted_sum(Exec exec, const Grid3& grid, std::span<const double> a, std::span<const double> b)
{
    if (a.size() != grid.size() || b.size() != grid.size()) {
        throw PreconditionError("weighted_sum: sample count does not match grid");
    }
    const int n = grid.n();
    const std::size_t plane = static_cast<std::size_t>(n) * n;
    std::vector<double> planes(n);
    for_each_chunk(exec, n, [&](std::ptrdiff_t k) {
        const double* pa = a.data() + k * plane;
        const double* pb = b.data() + k * plane;
        std::vector<double> rows(n);
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += pa[j * n + i] * pb[j * n + i];
            rows[j] = s;
        }
        planes[k] = tree_sum(rows);
    });
    return tree_sum(planes);
}

namespace detail {

PatchSum merge_planes(std::span<const PatchSum> planes)
{
    std::vector<double> buf(planes.size());
    PatchSum out;
    for (std::size_t i = 0; i < planes.size(); ++i) buf[i] = planes[i].fine;
    out.fine = tree_sum(buf);
    for (std::size_t i = 0; i < planes.size(); ++i) buf[i] = planes[i].coarse;
    out.coarse = tree_sum(buf);
    for (std::size_t i = 0; i < planes.size(); ++i) buf[i] = planes[i].magnitude;
    out.magnitude = tree_sum(buf);
    return out;
}

}  // namespace detail

}  // namespace cascade::kernels
