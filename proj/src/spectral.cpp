#include "cascade/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <fftw3.h>

#include "cascade/error.hpp"

namespace cascade::spectral {

namespace {

using cplx = std::complex<double>;

// Owns aligned buffers and a matched r2c / c2r plan pair for one grid.
class Fft {
public:
    explicit Fft(const Grid3& grid)
        : n_(grid.n()), real_size_(grid.size()), spec_size_(static_cast<std::size_t>(n_) * n_ * (n_ / 2 + 1))
    {
        real_ = static_cast<double*>(fftw_malloc(sizeof(double) * real_size_));
        spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * spec_size_));
        if (!real_ || !spec_) throw Error("fftw_malloc failed");
        forward_ = fftw_plan_dft_r2c_3d(n_, n_, n_, real_, spec_, FFTW_ESTIMATE);
        inverse_ = fftw_plan_dft_c2r_3d(n_, n_, n_, spec_, real_, FFTW_ESTIMATE);
    }
    ~Fft()
    {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
        fftw_free(real_);
        fftw_free(spec_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::size_t spec_size() const { return spec_size_; }

    std::vector<cplx> forward(std::span<const double> f)
    {
        std::copy(f.begin(), f.end(), real_);
        fftw_execute(forward_);
        const cplx* s = reinterpret_cast<const cplx*>(spec_);
        return {s, s + spec_size_};
    }

    std::vector<double> inverse(std::span<const cplx> spec)
    {
        std::copy(spec.begin(), spec.end(), reinterpret_cast<cplx*>(spec_));
        fftw_execute(inverse_);
        const double scale = 1.0 / static_cast<double>(real_size_);
        std::vector<double> out(real_size_);
        for (std::size_t q = 0; q < real_size_; ++q) out[q] = real_[q] * scale;
        return out;
    }

private:
    int n_;
    std::size_t real_size_;
    std::size_t spec_size_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

// Wavenumbers per axis. `first` zeroes the Nyquist mode (odd derivatives),
// `full` keeps it (even-order operators).
struct Wavenumbers {
    std::vector<double> first;
    std::vector<double> full;
};

Wavenumbers wavenumbers(const Grid3& grid)
{
    const int n = grid.n();
    const double k0 = 2.0 * std::numbers::pi / grid.box_length();
    Wavenumbers w;
    w.first.resize(n);
    w.full.resize(n);
    for (int m = 0; m < n; ++m) {
        const int s = m <= n / 2 ? m : m - n;
        w.full[m] = k0 * s;
        w.first[m] = (2 * m == n) ? 0.0 : k0 * s;
    }
    return w;
}

// Visits every retained spectral coefficient with its (kz, ky, kx) mode numbers.
template <class Fn>
void for_each_mode(int n, Fn&& fn)
{
    const int nh = n / 2 + 1;
    std::size_t q = 0;
    for (int kz = 0; kz < n; ++kz)
        for (int ky = 0; ky < n; ++ky)
            for (int kx = 0; kx < nh; ++kx, ++q) fn(q, kx, ky, kz);
}

std::vector<double> differentiate(Fft& fft, const Grid3& grid, const Wavenumbers& w, std::span<const double> f,
                                  int axis)
{
    auto spec = fft.forward(f);
    for_each_mode(grid.n(), [&](std::size_t q, int kx, int ky, int kz) {
        const int m = axis == 0 ? kx : (axis == 1 ? ky : kz);
        spec[q] *= cplx(0.0, w.first[m]);
    });
    return fft.inverse(spec);
}

void require_pressure(const VectorField3& field)
{
    if (!field.has_pressure()) throw PreconditionError("operation needs an attached pressure");
}

}  // namespace

std::vector<double> component(const VectorField3& field, int t, int c)
{
    const auto v = field.velocity(t);
    std::vector<double> out(field.grid.size());
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = v[3 * q + c];
    return out;
}

std::vector<double> derivative(const Grid3& grid, std::span<const double> f, int axis)
{
    if (f.size() != grid.size()) throw PreconditionError("derivative: sample count does not match grid");
    Fft fft(grid);
    return differentiate(fft, grid, wavenumbers(grid), f, axis);
}

std::vector<double> laplacian(const Grid3& grid, std::span<const double> f)
{
    if (f.size() != grid.size()) throw PreconditionError("laplacian: sample count does not match grid");
    Fft fft(grid);
    const auto w = wavenumbers(grid);
    auto spec = fft.forward(f);
    for_each_mode(grid.n(), [&](std::size_t q, int kx, int ky, int kz) {
        spec[q] *= -(w.full[kx] * w.full[kx] + w.full[ky] * w.full[ky] + w.full[kz] * w.full[kz]);
    });
    return fft.inverse(spec);
}

std::vector<double> divergence(const VectorField3& field, int t)
{
    Fft fft(field.grid);
    const auto w = wavenumbers(field.grid);
    std::vector<double> div(field.grid.size(), 0.0);
    for (int c = 0; c < 3; ++c) {
        const auto d = differentiate(fft, field.grid, w, component(field, t, c), c);
        for (std::size_t q = 0; q < div.size(); ++q) div[q] += d[q];
    }
    return div;
}

namespace {

// sum_ij k_i k_j FFT(u_i u_j), accumulated over the six independent products.
std::vector<cplx> stress_contraction(Fft& fft, const VectorField3& field, int t, const Wavenumbers& w)
{
    const auto v = field.velocity(t);
    const std::size_t N = field.grid.size();
    std::vector<cplx> acc(fft.spec_size(), cplx(0.0, 0.0));
    std::vector<double> prod(N);
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            for (std::size_t q = 0; q < N; ++q) prod[q] = v[3 * q + a] * v[3 * q + b];
            const auto spec = fft.forward(prod);
            const double mult = a == b ? 1.0 : 2.0;
            for_each_mode(field.grid.n(), [&](std::size_t q, int kx, int ky, int kz) {
                const double k[3] = {w.full[kx], w.full[ky], w.full[kz]};
                acc[q] += mult * k[a] * k[b] * spec[q];
            });
        }
    }
    return acc;
}

}  // namespace

std::vector<double> pressure_source(const VectorField3& field, int t)
{
    Fft fft(field.grid);
    const auto w = wavenumbers(field.grid);
    auto acc = stress_contraction(fft, field, t, w);
    for (auto& c : acc) c = -c;
    return fft.inverse(acc);
}

VectorField3 solve_pressure(VectorField3 field)
{
    field.check_finite();
    const std::size_t N = field.grid.size();
    field.p.assign(N * field.times.n_samples(), 0.0);
    Fft fft(field.grid);
    const auto w = wavenumbers(field.grid);
    for (int t = 0; t < field.times.n_samples(); ++t) {
        auto acc = stress_contraction(fft, field, t, w);
        // |k|^2 p_hat = -sum k_i k_j W_ij
        for_each_mode(field.grid.n(), [&](std::size_t q, int kx, int ky, int kz) {
            const double k2 = w.full[kx] * w.full[kx] + w.full[ky] * w.full[ky] + w.full[kz] * w.full[kz];
            acc[q] = k2 > 0.0 ? -acc[q] / k2 : cplx(0.0, 0.0);
        });
        const auto p = fft.inverse(acc);
        std::copy(p.begin(), p.end(), field.pressure(t).begin());
    }
    return field;
}

std::vector<double> momentum_residual(const VectorField3& field, int t)
{
    require_pressure(field);
    Fft fft(field.grid);
    const auto w = wavenumbers(field.grid);
    const std::size_t N = field.grid.size();
    const auto v = field.velocity(t);
    std::vector<double> res(3 * N, 0.0);
    for (int i = 0; i < 3; ++i) {
        const auto ui = component(field, t, i);
        for (int j = 0; j < 3; ++j) {
            const auto d = differentiate(fft, field.grid, w, ui, j);
            for (std::size_t q = 0; q < N; ++q) res[3 * q + i] += v[3 * q + j] * d[q];
        }
        const auto dp = differentiate(fft, field.grid, w, field.pressure(t), i);
        for (std::size_t q = 0; q < N; ++q) res[3 * q + i] += dp[q];
    }
    return res;
}

std::vector<double> advective_power(const VectorField3& field, int t)
{
    const auto res = momentum_residual(field, t);
    const auto v = field.velocity(t);
    std::vector<double> out(field.grid.size());
    for (std::size_t q = 0; q < out.size(); ++q) {
        out[q] = -(res[3 * q] * v[3 * q] + res[3 * q + 1] * v[3 * q + 1] + res[3 * q + 2] * v[3 * q + 2]);
    }
    return out;
}

std::vector<double> velocity_gradient_squared(const VectorField3& field, int t)
{
    Fft fft(field.grid);
    const auto w = wavenumbers(field.grid);
    std::vector<double> out(field.grid.size(), 0.0);
    for (int i = 0; i < 3; ++i) {
        const auto ui = component(field, t, i);
        for (int j = 0; j < 3; ++j) {
            const auto d = differentiate(fft, field.grid, w, ui, j);
            for (std::size_t q = 0; q < out.size(); ++q) out[q] += d[q] * d[q];
        }
    }
    return out;
}

}  // namespace cascade::spectral
