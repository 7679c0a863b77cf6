#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cascade/kernels.hpp"
#include "cascade/vec3.hpp"

namespace cascade {

/// Outcome of a probe verification.
struct CoverReport {
    bool n_ok = false;
    bool coverage_ok = false;
    int multiplicity_max = 0;
    std::size_t uncovered = 0;
    std::size_t n_probe = 0;

    bool ok(int K2) const { return n_ok && coverage_ok && multiplicity_max <= K2; }
};

/// Balls B(x_i, R) with centers in the closed ball B(0, R0), declared as a
/// (K1, K2)-cover: (R0/R)^3 <= n <= K1 (R0/R)^3, every point of B(0, R0) in
/// some B(x_i, R), and at most K2 of the B(x_i, 2R) over any point.
struct Cover {
    double R0 = 1.0;
    double R = 1.0;
    int K1 = 20;
    int K2 = 40;
    std::vector<Vec3> centers;
    bool verified = false;
    CoverReport verification;  // the probe check run by generate_cover

    std::size_t n() const { return centers.size(); }
    double n_lower() const;
    double n_upper() const;
};

struct CoverOptions {
    double jitter = 0.0;        // fraction of R, in [0, 0.2]
    std::uint64_t seed = 0;
    std::size_t n_probe = 100000;  // probes for the built-in verification
};

/// Body-centered cubic lattice with covering radius 0.95 R and a seeded
/// offset, kept inside B(0, R0), plus one Fibonacci sphere layer for the
/// boundary shell. Small ratios R0/R use a central ball plus one layer;
/// R == R0 gives the single ball at the origin. Optional jitter moves each
/// center by up to jitter * R, then projects it back into B(0, R0).
/// Coverage is guaranteed for jitter <= 0.05 and probe-verified always.
/// Throws InfeasibleCover with the achieved n and multiplicity when the
/// bounds cannot be met.
Cover generate_cover(double R0, double R, int K1, int K2, const CoverOptions& options = {},
                     kernels::Exec exec = kernels::Exec::parallel);

/// Exact n bounds plus coverage and 2R-multiplicity on n_probe quasi-random
/// points of B(0, R0): a 3D Kronecker sequence with seeded start in the cube
/// [-R0, R0]^3, keeping the points inside the ball. Needs n_probe >= 1e5.
CoverReport verify_cover(const Cover& cover, std::size_t n_probe, std::uint64_t seed,
                         kernels::Exec exec = kernels::Exec::parallel);

/// Same probes, checked against every center. Reference for tests.
CoverReport verify_cover_reference(const Cover& cover, std::size_t n_probe, std::uint64_t seed);

/// The i-th probe point of verify_cover for a ball of radius R0.
Vec3 probe_point(std::size_t i, std::uint64_t seed, double R0);

/// Lattice of spacing R/2 in B(0, R0) split into stride^3 sublattices of
/// spacing stride * R/2. Each lattice point picks its nearest cover ball;
/// a family collects the distinct balls picked within one sublattice.
struct LatticeDecomposition {
    double spacing = 0.0;
    int stride = 12;
    Vec3 offset;
    std::size_t base_count = 0;
    double count_lower = 0.0;  // 2^3 (R0/R)^3
    double count_upper = 0.0;  // (4 pi / 3) 2^3 (R0/R)^3
    std::vector<std::vector<std::size_t>> families;  // cover indices, one list per sublattice
    double min_family_distance = 0.0;                // smallest center distance inside any family
    bool disjoint = false;                           // every family has pairwise distance >= 4R

    std::size_t sublattices() const { return families.size(); }
};

/// stride 12 certifies disjointness of the B(., 2R) inside each family;
/// stride 8 (spacing 4R) is accepted but may fail the certificate.
LatticeDecomposition decompose_lattice(const Cover& cover, int stride = 12);

/// R0 2^k for k = k_max down to k_min.
std::vector<double> dyadic_scales(double R0, int k_min, int k_max);

/// Header line "R0 R K1 K2 n", then one "x y z" line per center.
void write_cover(const Cover& cover, const std::string& path);
Cover read_cover(const std::string& path);

}  // namespace cascade
