#include "cascade/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>

#include "cascade/error.hpp"

static_assert(std::endian::native == std::endian::little, "field files are written in host byte order");

namespace cascade {

namespace {

constexpr char kVelocityMagic[4] = {'C', 'S', 'F', '1'};
constexpr char kDensityMagic[4] = {'C', 'S', 'D', '1'};

struct Header {
    char magic[4];
    std::uint32_t n = 0;
    double box_length = 0.0;
    double origin[3] = {0.0, 0.0, 0.0};
    std::uint32_t n_time = 0;
    double t_end = 0.0;
    std::uint8_t has_pressure = 0;
    std::uint8_t steady = 0;
};

template <class T>
void put(std::ofstream& out, const T& v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in)
{
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("malformed header: file ends inside the header");
    return v;
}

void write_header(std::ofstream& out, const Header& h)
{
    out.write(h.magic, 4);
    put(out, h.n);
    put(out, h.box_length);
    for (double o : h.origin) put(out, o);
    put(out, h.n_time);
    put(out, h.t_end);
    put(out, h.has_pressure);
    put(out, h.steady);
}

Header read_header(std::ifstream& in)
{
    Header h;
    in.read(h.magic, 4);
    if (!in) throw FormatError("malformed header: file ends inside the header");
    h.n = get<std::uint32_t>(in);
    h.box_length = get<double>(in);
    for (double& o : h.origin) o = get<double>(in);
    h.n_time = get<std::uint32_t>(in);
    h.t_end = get<double>(in);
    h.has_pressure = get<std::uint8_t>(in);
    h.steady = get<std::uint8_t>(in);

    if (h.n < 8) throw FormatError("malformed header: n = " + std::to_string(h.n) + " (need n >= 8)");
    if (h.n > 4096) throw FormatError("malformed header: n = " + std::to_string(h.n) + " is implausibly large");
    if (h.n_time < 1) throw FormatError("malformed header: n_time = 0");
    if (!(h.box_length > 0.0) || !std::isfinite(h.box_length)) throw FormatError("malformed header: box_length");
    if (!(h.t_end > 0.0) || !std::isfinite(h.t_end)) throw FormatError("malformed header: t_end");
    if (h.has_pressure > 1 || h.steady > 1) throw FormatError("malformed header: flag bytes must be 0 or 1");
    if ((h.steady == 1) != (h.n_time == 1)) throw FormatError("malformed header: steady flag disagrees with n_time");
    return h;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    return out;
}

void write_block(std::ofstream& out, std::span<const double> v)
{
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
}

void read_block(std::ifstream& in, std::span<double> v)
{
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size_bytes()));
    if (in.gcount() != static_cast<std::streamsize>(v.size_bytes())) {
        throw FormatError("payload shorter than header claims");
    }
}

void expect_end(std::ifstream& in)
{
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

Header header_for(const Grid3& g, const TimeAxis& t, const char* magic, bool has_pressure)
{
    Header h;
    std::memcpy(h.magic, magic, 4);
    h.n = static_cast<std::uint32_t>(g.n());
    h.box_length = g.box_length();
    h.origin[0] = g.origin().x;
    h.origin[1] = g.origin().y;
    h.origin[2] = g.origin().z;
    h.n_time = static_cast<std::uint32_t>(t.n_samples());
    h.t_end = t.t_end();
    h.has_pressure = has_pressure ? 1 : 0;
    h.steady = t.is_steady() ? 1 : 0;
    return h;
}

}  // namespace

std::size_t field_file_bytes(int n, int n_time, bool has_pressure)
{
    const std::size_t nodes = static_cast<std::size_t>(n) * n * n * n_time;
    return kFieldHeaderBytes + 8 * nodes * (has_pressure ? 4 : 3);
}

void write_field(const VectorField3& field, const std::string& path)
{
    auto out = open_out(path);
    write_header(out, header_for(field.grid, field.times, kVelocityMagic, field.has_pressure()));
    write_block(out, field.u);
    if (field.has_pressure()) write_block(out, field.p);
    if (!out) throw Error("write to '" + path + "' failed");
}

VectorField3 read_field(const std::string& path)
{
    auto in = open_in(path);
    const Header h = read_header(in);
    if (std::memcmp(h.magic, kVelocityMagic, 4) != 0) throw FormatError("malformed header: not a velocity file");
    VectorField3 f(Grid3(static_cast<int>(h.n), h.box_length, {h.origin[0], h.origin[1], h.origin[2]}),
                   TimeAxis(h.t_end, static_cast<int>(h.n_time)));
    read_block(in, f.u);
    if (h.has_pressure) {
        f.p.resize(f.grid.size() * h.n_time);
        read_block(in, f.p);
    }
    expect_end(in);
    f.check_finite();
    return f;
}

void write_density(const ScalarField& density, const std::string& path)
{
    auto out = open_out(path);
    write_header(out, header_for(density.grid, density.times, kDensityMagic, false));
    write_block(out, density.data);
    if (!out) throw Error("write to '" + path + "' failed");
}

ScalarDensity read_density(const std::string& path)
{
    auto in = open_in(path);
    const Header h = read_header(in);
    if (std::memcmp(h.magic, kDensityMagic, 4) != 0) throw FormatError("malformed header: not a density file");
    if (h.has_pressure) throw FormatError("malformed header: density files carry no pressure");
    ScalarField f(Grid3(static_cast<int>(h.n), h.box_length, {h.origin[0], h.origin[1], h.origin[2]}),
                  TimeAxis(h.t_end, static_cast<int>(h.n_time)));
    read_block(in, f.data);
    expect_end(in);
    return ScalarDensity(std::move(f));
}

FileKind peek_file_kind(const std::string& path)
{
    auto in = open_in(path);
    char magic[4];
    in.read(magic, 4);
    if (!in) throw FormatError("malformed header: file ends inside the header");
    if (std::memcmp(magic, kVelocityMagic, 4) == 0) return FileKind::velocity;
    if (std::memcmp(magic, kDensityMagic, 4) == 0) return FileKind::density;
    throw FormatError("malformed header: unknown magic");
}

}  // namespace cascade
