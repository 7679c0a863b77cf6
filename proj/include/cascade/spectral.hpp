#pragma once

#include <array>
#include <span>
#include <vector>

#include "cascade/grid.hpp"

namespace cascade::spectral {

/// d f / d x_axis by Fourier differentiation on the periodic grid.
std::vector<double> derivative(const Grid3& grid, std::span<const double> f, int axis);

/// Spectral Laplacian of a scalar.
std::vector<double> laplacian(const Grid3& grid, std::span<const double> f);

/// div u at one time sample.
std::vector<double> divergence(const VectorField3& field, int t);

/// Right-hand side d_i d_j (u^i u^j) of the pressure Poisson equation.
std::vector<double> pressure_source(const VectorField3& field, int t);

/// Attaches p solving -lap p = d_i d_j (u^i u^j) per time sample, zero-mean gauge.
VectorField3 solve_pressure(VectorField3 field);

/// (u . grad) u + grad p at one time sample, 3 components per node.
/// Requires an attached pressure.
std::vector<double> momentum_residual(const VectorField3& field, int t);

/// -((u . grad) u + grad p) . u, the advective power density.
std::vector<double> advective_power(const VectorField3& field, int t);

/// |grad u|^2 = sum_ij (d_j u^i)^2.
std::vector<double> velocity_gradient_squared(const VectorField3& field, int t);

/// Extracts one velocity component at time t into a contiguous array.
std::vector<double> component(const VectorField3& field, int t, int c);

}  // namespace cascade::spectral
