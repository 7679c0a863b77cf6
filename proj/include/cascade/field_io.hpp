#pragma once

#include <cstddef>
#include <string>

#include "cascade/grid.hpp"

namespace cascade {

/// Binary field file, little-endian:
///   magic (4 bytes), u32 n, f64 box_length, f64 origin[3], u32 n_time,
///   f64 t_end, u8 has_pressure, u8 steady
/// followed by f64 samples in (t, z, y, x, component) order and, when
/// present, the pressure block. Velocity files use magic "CSF1"; scalar
/// densities use "CSD1" with one component and no pressure.
inline constexpr std::size_t kFieldHeaderBytes = 54;

void write_field(const VectorField3& field, const std::string& path);
VectorField3 read_field(const std::string& path);

void write_density(const ScalarField& density, const std::string& path);
ScalarDensity read_density(const std::string& path);

/// Kind of field stored in a file, from its magic alone.
enum class FileKind { velocity, density };
FileKind peek_file_kind(const std::string& path);

/// Expected file size for a velocity file with the given shape.
std::size_t field_file_bytes(int n, int n_time, bool has_pressure);

}  // namespace cascade
