#include "cascade/cover.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cascade/error.hpp"

namespace cascade {

namespace {

constexpr double kSafety = 0.95;
// Root of x^4 = x + 1; its inverse powers give a 3D Kronecker sequence.
constexpr double kHarmonious = 1.22074408460575947536;
constexpr int kProbeChunks = 64;

double cube(double x) { return x * x * x; }

// Cells of side ~R/3 over [-R0, R0]^3. Per cell: how many 2R-balls surely
// contain the whole cell, whether some R-ball surely covers it, and the
// centers that only partially overlap it (checked per probe).
class ProbeIndex {
public:
    ProbeIndex(const Cover& cover) : R0_(cover.R0), R_(cover.R)
    {
        M_ = std::clamp(static_cast<int>(std::ceil(6.0 * R0_ / R_)), 1, 160);
        c_ = 2.0 * R0_ / M_;
        inv_c_ = 1.0 / c_;
        const std::size_t cells = static_cast<std::size_t>(M_) * M_ * M_;
        sure_mult_.assign(cells, 0);
        sure_cov_.assign(cells, 0);
        meets_ball_.assign(cells, 0);
        const double R02 = R0_ * R0_;
        for (int k = 0; k < M_; ++k)
            for (int j = 0; j < M_; ++j)
                for (int i = 0; i < M_; ++i) {
                    const double ox = gap(i), oy = gap(j), oz = gap(k);
                    meets_ball_[(static_cast<std::size_t>(k) * M_ + j) * M_ + i] = ox * ox + oy * oy + oz * oz <= R02;
                }
        xyz_.reserve(3 * cover.centers.size());
        for (const Vec3& x : cover.centers) xyz_.insert(xyz_.end(), {x.x, x.y, x.z});

        // (cell, center id) pairs needing a per-probe distance check
        std::vector<std::pair<std::uint32_t, std::uint32_t>> mult_pairs, cov_pairs;
        mult_pairs.reserve(cover.centers.size() * 1024);
        cov_pairs.reserve(cover.centers.size() * 256);
        visit(cover, [&](std::size_t cell, std::uint32_t id, bool mult_sure, bool cov_sure, bool cov_part) {
            if (mult_sure) ++sure_mult_[cell];
            else mult_pairs.emplace_back(static_cast<std::uint32_t>(cell), id);
            if (cov_sure) sure_cov_[cell] = 1;
            else if (cov_part) cov_pairs.emplace_back(static_cast<std::uint32_t>(cell), id);
        });
        // a surely covered cell needs no coverage candidates
        std::erase_if(cov_pairs, [&](const auto& pr) { return sure_cov_[pr.first] != 0; });
        bucket(mult_pairs, cells, mult_start_, mult_id_);
        bucket(cov_pairs, cells, cov_start_, cov_id_);
    }

    // Multiplicity of the 2R-balls at p, except that when the cell bound
    // cannot exceed `known` only the sure count is returned (a lower bound).
    // covered is set when some R-ball contains p.
    int query(const Vec3& p, int known, bool& covered) const
    {
        const std::size_t cell = cell_of(p);
        int count = static_cast<int>(sure_mult_[cell]);
        const std::uint32_t m0 = mult_start_[cell], m1 = mult_start_[cell + 1];
        if (count + static_cast<int>(m1 - m0) > known) {
            const double r2 = 4.0 * R_ * R_;
            for (std::uint32_t k = m0; k < m1; ++k) {
                const double* x = xyz_.data() + 3 * static_cast<std::size_t>(mult_id_[k]);
                const double dx = p.x - x[0], dy = p.y - x[1], dz = p.z - x[2];
                count += (dx * dx + dy * dy + dz * dz < r2) ? 1 : 0;
            }
        }
        covered = sure_cov_[cell] != 0;
        const double c2 = R_ * R_;
        for (std::uint32_t k = cov_start_[cell]; !covered && k < cov_start_[cell + 1]; ++k) {
            const double* x = xyz_.data() + 3 * static_cast<std::size_t>(cov_id_[k]);
            const double dx = p.x - x[0], dy = p.y - x[1], dz = p.z - x[2];
            covered = dx * dx + dy * dy + dz * dz <= c2;
        }
        return count;
    }

    std::size_t cell_of(const Vec3& p) const
    {
        // probes lie in [-R0, R0], so the scaled coordinates are nonnegative
        const int i = std::min(static_cast<int>((p.x + R0_) * inv_c_), M_ - 1);
        const int j = std::min(static_cast<int>((p.y + R0_) * inv_c_), M_ - 1);
        const int k = std::min(static_cast<int>((p.z + R0_) * inv_c_), M_ - 1);
        return (static_cast<std::size_t>(k) * M_ + j) * M_ + i;
    }

private:
    // Distance from the origin to cell index i along one axis.
    double gap(int i) const
    {
        const double lo = -R0_ + i * c_;
        return std::max(0.0, std::max(lo, -lo - c_));
    }

    // Counting sort of (cell, id) pairs into CSR form; ids keep visit order.
    static void bucket(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs, std::size_t cells,
                       std::vector<std::uint32_t>& start, std::vector<std::uint32_t>& ids)
    {
        start.assign(cells + 1, 0);
        for (const auto& pr : pairs) ++start[pr.first + 1];
        for (std::size_t q = 0; q < cells; ++q) start[q + 1] += start[q];
        ids.resize(pairs.size());
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (const auto& pr : pairs) ids[fill[pr.first]++] = pr.second;
    }

    // Calls fn(cell, center id, mult_sure, cov_sure, cov_part) for every
    // (ball, cell) pair where the 2R-ball meets a cell that meets B(0, R0).
    template <class Fn>
    void visit(const Cover& cover, Fn&& fn) const
    {
        const double r2 = 4.0 * R_ * R_;
        const double c2 = R_ * R_;
        std::vector<double> near[3], far[3];
        for (std::uint32_t id = 0; id < cover.centers.size(); ++id) {
            const Vec3& x = cover.centers[id];
            int first[3], last[3];
            for (int a = 0; a < 3; ++a) {
                first[a] = std::max(0, static_cast<int>(std::floor((x[a] - 2.0 * R_ + R0_) / c_)));
                last[a] = std::min(M_ - 1, static_cast<int>(std::floor((x[a] + 2.0 * R_ + R0_) / c_)));
                near[a].clear();
                far[a].clear();
                for (int i = first[a]; i <= last[a]; ++i) {
                    const double lo = -R0_ + i * c_;
                    const double hi = lo + c_;
                    const double dn = x[a] < lo ? lo - x[a] : (x[a] > hi ? x[a] - hi : 0.0);
                    const double df = std::max(std::abs(x[a] - lo), std::abs(x[a] - hi));
                    near[a].push_back(dn * dn);
                    far[a].push_back(df * df);
                }
            }
            for (int k = first[2]; k <= last[2]; ++k) {
                for (int j = first[1]; j <= last[1]; ++j) {
                    const double rem = r2 - near[1][j - first[1]] - near[2][k - first[2]];
                    if (rem <= 0.0) continue;
                    // cells farther along x cannot meet the 2R-ball; one cell of
                    // slack absorbs rounding, the exact test below decides
                    const double s = std::sqrt(rem);
                    const int ilo = std::max(first[0], static_cast<int>(std::floor((x.x - s + R0_) * inv_c_)) - 1);
                    const int ihi = std::min(last[0], static_cast<int>(std::floor((x.x + s + R0_) * inv_c_)) + 1);
                    const std::size_t row = (static_cast<std::size_t>(k) * M_ + j) * M_;
                    for (int i = ilo; i <= ihi; ++i) {
                        if (!meets_ball_[row + i]) continue;
                        const double n2 = near[0][i - first[0]] + near[1][j - first[1]] + near[2][k - first[2]];
                        if (n2 >= r2) continue;
                        const double f2 = far[0][i - first[0]] + far[1][j - first[1]] + far[2][k - first[2]];
                        fn(row + i, id, f2 < r2, f2 <= c2, n2 <= c2);
                    }
                }
            }
        }
    }

    double R0_, R_;
    int M_;
    double c_;
    double inv_c_;
    std::vector<std::uint32_t> sure_mult_;
    std::vector<std::uint8_t> sure_cov_;
    std::vector<std::uint8_t> meets_ball_;  // cell meets B(0, R0)
    std::vector<std::uint32_t> mult_start_, cov_start_;
    std::vector<double> xyz_;  // center coordinates, 3 per center
    std::vector<std::uint32_t> mult_id_, cov_id_;
};

// Fibonacci sphere points (z_i = 1 - (2i + 1)/N). Their angular covering
// radius stays below kFibonacciCover / sqrt(N) for N >= 8; the constant was
// measured exactly (convex hull circumradii) for N up to 3e4.
constexpr double kFibonacciCover = 2.76;
constexpr int kMinLayer = 8;

void append_fibonacci_layer(std::vector<Vec3>& centers, double rho, int N)
{
    const double golden = std::numbers::pi * (1.0 + std::sqrt(5.0));
    for (int i = 0; i < N; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / N;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ph = golden * (i + 0.5);
        centers.push_back(Vec3{r * std::cos(ph), r * std::sin(ph), z} * rho);
    }
}

// A layer at radius rho whose points are within angle theta of every
// direction covers, with radius c, the radii r where
// r^2 + rho^2 - 2 r rho cos(theta) <= c^2.
bool layer_covers(double rho, double theta, double c, double lo, double hi)
{
    const double s2 = c * c - rho * rho * std::sin(theta) * std::sin(theta);
    if (s2 < 0.0) return false;
    const double s = std::sqrt(s2);
    const double mid = rho * std::cos(theta);
    return mid - s <= lo && mid + s >= hi;
}

struct LayerPlan {
    double rho = 0.0;
    int N = 0;
};

// Smallest Fibonacci layer covering the radii [lo, hi] with radius c.
LayerPlan plan_layer(double lo, double hi, double c)
{
    LayerPlan best;
    constexpr int steps = 400;
    for (int k = 0; k <= steps; ++k) {
        const double rho = lo + (hi - lo) * k / steps;
        if (!(rho > 0.0) || !layer_covers(rho, 0.0, c, lo, hi)) continue;
        double ok = 0.0, bad = 0.5 * std::numbers::pi;
        if (layer_covers(rho, bad, c, lo, hi)) ok = bad;
        for (int it = 0; it < 60 && ok != bad; ++it) {
            const double mid = 0.5 * (ok + bad);
            (layer_covers(rho, mid, c, lo, hi) ? ok : bad) = mid;
        }
        const double need = kFibonacciCover / ok;
        if (!(need * need < 1e7)) continue;
        const int N = std::max(kMinLayer, static_cast<int>(std::ceil(need * need)));
        if (best.N == 0 || N < best.N) best = {rho, N};
    }
    if (best.N == 0) throw Error("no spherical layer covers the boundary shell");
    return best;
}

struct ProbePartial {
    int mult = 0;
    std::size_t uncovered = 0;
};

CoverReport finish(const Cover& cover, std::size_t n_probe, const std::vector<ProbePartial>& parts)
{
    CoverReport r;
    r.n_probe = n_probe;
    const double n = static_cast<double>(cover.n());
    r.n_ok = n >= cover.n_lower() && n <= cover.n_upper();
    for (const auto& p : parts) {
        r.multiplicity_max = std::max(r.multiplicity_max, p.mult);
        r.uncovered += p.uncovered;
    }
    r.coverage_ok = r.uncovered == 0;
    return r;
}

void check_probe_count(std::size_t n_probe)
{
    if (n_probe < 100000) throw PreconditionError("verify_cover needs n_probe >= 1e5");
}

}  // namespace

double Cover::n_lower() const { return cube(R0 / R); }
double Cover::n_upper() const { return K1 * cube(R0 / R); }

namespace {

// R3 Kronecker sequence with a seeded start in the cube [-R0, R0]^3; the
// probes are its points inside B(0, R0), in sequence order.
class ProbeSequence {
public:
    ProbeSequence(std::uint64_t seed, double R0) : R0_(R0)
    {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double& s : start_) s = unit(rng);
        alpha_[0] = 1.0 / kHarmonious;
        alpha_[1] = alpha_[0] / kHarmonious;
        alpha_[2] = alpha_[1] / kHarmonious;
    }

    // Fractional state of sequence point k, from which `step` moves on.
    // Stepping accumulates rounding, so the state is recomputed exactly at
    // every multiple of kReseek; a point depends only on its index.
    static constexpr std::size_t kReseek = 4096;
    void seek(std::size_t k, double frac[3]) const
    {
        for (int a = 0; a < 3; ++a) {
            // s >= 0, so truncation is floor
            const double s = start_[a] + static_cast<double>(k + 1) * alpha_[a];
            frac[a] = s - static_cast<double>(static_cast<std::int64_t>(s));
        }
    }
    static void step(double& fx, double& fy, double& fz, double ax, double ay, double az)
    {
        fx += ax;
        fy += ay;
        fz += az;
        fx -= fx >= 1.0 ? 1.0 : 0.0;
        fy -= fy >= 1.0 ? 1.0 : 0.0;
        fz -= fz >= 1.0 ? 1.0 : 0.0;
    }

    // Sequence length that holds n accepted points with room to spare: the
    // acceptance rate is pi/6 and the discrepancy of the sequence is tiny.
    static std::size_t span_bound(std::size_t n)
    {
        return static_cast<std::size_t>(static_cast<double>(n) * (6.0 / std::numbers::pi) * 1.02) + 1024;
    }

    // Calls fn(k, p) for each accepted point with sequence index in [first, last).
    template <class Fn>
    void for_range(std::size_t first, std::size_t last, Fn&& fn) const
    {
        const double ax = alpha_[0], ay = alpha_[1], az = alpha_[2];
        const double R0 = R0_, R02 = R0_ * R0_;
        double frac[3];
        std::size_t k = first - first % kReseek;
        seek(k, frac);
        double fx = frac[0], fy = frac[1], fz = frac[2];
        for (; k < first; ++k) step(fx, fy, fz, ax, ay, az);
        while (k < last) {
            const std::size_t stop = std::min(last, k - k % kReseek + kReseek);
            for (; k < stop; ++k) {
                const double x = R0 * (2.0 * fx - 1.0), y = R0 * (2.0 * fy - 1.0), z = R0 * (2.0 * fz - 1.0);
                if (x * x + y * y + z * z <= R02) fn(k, Vec3{x, y, z});
                step(fx, fy, fz, ax, ay, az);
            }
            if (k < last) {
                seek(k, frac);
                fx = frac[0];
                fy = frac[1];
                fz = frac[2];
            }
        }
    }

private:
    double R0_;
    double start_[3];
    double alpha_[3];
};

// Per sequence index: multiplicity (saturated), kUncovered when no R-ball
// contains the point, and kRejected for points outside B(0, R0).
constexpr std::uint16_t kRejected = 0xFFFF;
constexpr std::uint16_t kUncovered = 0x8000;

std::uint16_t pack(int mult, bool covered)
{
    return static_cast<std::uint16_t>(std::min(mult, 0x7FFE) | (covered ? 0 : kUncovered));
}

// Evaluates query(p, known, covered) on the sequence and reduces the first
// n_probe accepted points. Marks are stored by sequence index, so the thread
// count cannot change which points are counted. `known` is the largest
// multiplicity seen earlier in the same chunk; a query may return a lower
// bound when its true value cannot exceed it. The maximum over the counted
// points stays exact: if the maximizer was cut short, an earlier point of
// its chunk, also counted, already attains the maximum.
template <class Query>
CoverReport run_probes(const Cover& cover, std::size_t n_probe, std::uint64_t seed, kernels::Exec exec,
                       Query&& query)
{
    const ProbeSequence probes(seed, cover.R0);
    const std::size_t span = ProbeSequence::span_bound(n_probe);
    std::vector<std::uint16_t> marks(span, kRejected);
    kernels::for_each_chunk(exec, kProbeChunks, [&](std::ptrdiff_t c) {
        const std::size_t first = span * c / kProbeChunks;
        const std::size_t last = span * (c + 1) / kProbeChunks;
        int known = 0;
        probes.for_range(first, last, [&](std::size_t k, const Vec3& p) {
            bool covered = false;
            const int mult = query(p, known, covered);
            known = std::max(known, mult);
            marks[k] = pack(mult, covered);
        });
    });
    ProbePartial part;
    std::size_t got = 0;
    for (std::size_t k = 0; k < span && got < n_probe; ++k) {
        if (marks[k] == kRejected) continue;
        ++got;
        part.mult = std::max(part.mult, static_cast<int>(marks[k] & 0x7FFF));
        if (marks[k] & kUncovered) ++part.uncovered;
    }
    if (got < n_probe) throw Error("probe sequence ran short");
    return finish(cover, n_probe, {part});
}

}  // namespace

Vec3 probe_point(std::size_t i, std::uint64_t seed, double R0)
{
    const ProbeSequence seq(seed, R0);
    Vec3 out;
    bool found = false;
    for (std::size_t first = 0; !found; first += ProbeSequence::kReseek) {
        seq.for_range(first, first + ProbeSequence::kReseek, [&](std::size_t, const Vec3& p) {
            if (!found && i-- == 0) {
                out = p;
                found = true;
            }
        });
    }
    return out;
}

CoverReport verify_cover(const Cover& cover, std::size_t n_probe, std::uint64_t seed, kernels::Exec exec)
{
    check_probe_count(n_probe);
    const ProbeIndex index(cover);
    return run_probes(cover, n_probe, seed, exec,
                      [&](const Vec3& p, int known, bool& covered) { return index.query(p, known, covered); });
}

CoverReport verify_cover_reference(const Cover& cover, std::size_t n_probe, std::uint64_t seed)
{
    check_probe_count(n_probe);
    const double r2 = 4.0 * cover.R * cover.R;
    const double c2 = cover.R * cover.R;
    return run_probes(cover, n_probe, seed, kernels::Exec::serial, [&](const Vec3& p, int, bool& covered) {
        int count = 0;
        for (const Vec3& x : cover.centers) {
            const double d2 = norm2(p - x);
            count += d2 < r2 ? 1 : 0;
            covered = covered || d2 <= c2;
        }
        return count;
    });
}

Cover generate_cover(double R0, double R, int K1, int K2, const CoverOptions& options, kernels::Exec exec)
{
    if (!(R0 > 0.0) || !(R > 0.0) || !(R <= R0)) throw PreconditionError("cover needs 0 < R <= R0");
    if (K1 < 1 || K2 < 1) throw PreconditionError("cover needs K1 >= 1 and K2 >= 1");
    if (!(options.jitter >= 0.0 && options.jitter <= 0.2)) throw PreconditionError("jitter must lie in [0, 0.2]");

    Cover cover;
    cover.R0 = R0;
    cover.R = R;
    cover.K1 = K1;
    cover.K2 = K2;

    if (R == R0) {
        cover.centers.push_back({});
    } else {
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double c = kSafety * R;
        if (R0 <= 3.0 * c) {
            // One central ball covers |y| <= 0.95 R; a single layer covers the rest.
            cover.centers.push_back({});
            const LayerPlan layer = plan_layer(c, R0, c);
            append_fibonacci_layer(cover.centers, layer.rho, layer.N);
        } else {
            // Body-centered cubic core; its covering radius a sqrt(5)/4 is 0.95 R.
            // A point of B(0, R0) whose nearest lattice point falls outside
            // lies in the shell R0 - 0.95 R <= |y| <= R0, covered by the layer.
            const double a = 4.0 * c / std::sqrt(5.0);
            const Vec3 offset{a * unit(rng), a * unit(rng), a * unit(rng)};
            const int span = static_cast<int>(std::ceil(R0 / a)) + 1;
            for (int k = -span; k <= span; ++k)
                for (int j = -span; j <= span; ++j)
                    for (int i = -span; i <= span; ++i)
                        for (const double h : {0.0, 0.5}) {
                            const Vec3 p = offset + Vec3{a * (i + h), a * (j + h), a * (k + h)};
                            if (norm(p) <= R0) cover.centers.push_back(p);
                        }
            const LayerPlan layer = plan_layer(R0 - c, R0, c);
            append_fibonacci_layer(cover.centers, layer.rho, layer.N);
        }
        // jitter after the lattice is fixed, so n does not depend on it
        std::uniform_real_distribution<double> sym(-1.0, 1.0);
        for (Vec3& x : cover.centers) {
            if (options.jitter > 0.0) {
                Vec3 d;
                do {
                    d = {sym(rng), sym(rng), sym(rng)};
                } while (norm2(d) > 1.0);
                x += d * (options.jitter * R);
            }
            const double r = norm(x);
            if (r > R0) x *= R0 / r;
        }
    }

    const auto report = verify_cover(cover, std::max<std::size_t>(options.n_probe, 100000), options.seed, exec);
    if (!report.n_ok) {
        throw InfeasibleCover("cover size n = " + std::to_string(cover.n()) + " outside [" +
                                  std::to_string(cover.n_lower()) + ", " + std::to_string(cover.n_upper()) + "]",
                              cover.n(), report.multiplicity_max);
    }
    if (!report.coverage_ok) {
        throw InfeasibleCover(std::to_string(report.uncovered) + " probes left uncovered", cover.n(),
                              report.multiplicity_max);
    }
    if (report.multiplicity_max > K2) {
        throw InfeasibleCover("multiplicity " + std::to_string(report.multiplicity_max) + " exceeds K2 = " +
                                  std::to_string(K2),
                              cover.n(), report.multiplicity_max);
    }
    cover.verified = true;
    cover.verification = report;
    return cover;
}

LatticeDecomposition decompose_lattice(const Cover& cover, int stride)
{
    if (stride < 1) throw PreconditionError("sublattice stride must be positive");
    if (cover.centers.empty()) throw PreconditionError("empty cover");
    const double R = cover.R;
    const double R0 = cover.R0;

    LatticeDecomposition dec;
    dec.stride = stride;
    dec.spacing = 0.5 * R;
    dec.count_lower = 8.0 * cube(R0 / R);
    dec.count_upper = (4.0 * std::numbers::pi / 3.0) * 8.0 * cube(R0 / R);
    const double a = dec.spacing;
    const int span = static_cast<int>(std::ceil(R0 / a)) + 1;

    struct Node { int i, j, k; Vec3 x; };
    std::vector<Node> nodes;
    for (const double shift : {0.0, 0.5}) {
        nodes.clear();
        const Vec3 off{shift * a, shift * a, shift * a};
        for (int k = -span; k <= span; ++k)
            for (int j = -span; j <= span; ++j)
                for (int i = -span; i <= span; ++i) {
                    const Vec3 x = off + Vec3{a * i, a * j, a * k};
                    if (norm(x) <= R0) nodes.push_back({i, j, k, x});
                }
        dec.offset = off;
        if (nodes.size() >= dec.count_lower && nodes.size() <= dec.count_upper) break;
    }
    dec.base_count = nodes.size();
    if (dec.base_count < dec.count_lower || dec.base_count > dec.count_upper) {
        throw Error("base lattice count " + std::to_string(dec.base_count) + " outside its bounds");
    }

    // Centers bucketed in cells of side R: a point's covering balls sit in the 27 neighbors.
    const int M = static_cast<int>(std::ceil(2.0 * R0 / R)) + 1;
    const auto cell_axis = [&](double v) { return std::clamp(static_cast<int>(std::floor((v + R0) / R)), 0, M - 1); };
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(M) * M * M);
    const auto bucket = [&](int i, int j, int k) -> auto& { return buckets[(static_cast<std::size_t>(k) * M + j) * M + i]; };
    for (std::size_t c = 0; c < cover.centers.size(); ++c) {
        const Vec3& x = cover.centers[c];
        bucket(cell_axis(x.x), cell_axis(x.y), cell_axis(x.z)).push_back(c);
    }
    const auto for_near = [&](const Vec3& p, auto&& fn) {
        const int ci = cell_axis(p.x), cj = cell_axis(p.y), ck = cell_axis(p.z);
        for (int k = std::max(0, ck - 1); k <= std::min(M - 1, ck + 1); ++k)
            for (int j = std::max(0, cj - 1); j <= std::min(M - 1, cj + 1); ++j)
                for (int i = std::max(0, ci - 1); i <= std::min(M - 1, ci + 1); ++i)
                    for (std::size_t c : bucket(i, j, k)) fn(c);
    };

    // Every ball must contain a lattice point.
    std::vector<char> hit(cover.centers.size(), 0);
    for (const Node& nd : nodes) {
        for_near(nd.x, [&](std::size_t c) {
            if (norm(nd.x - cover.centers[c]) <= R) hit[c] = 1;
        });
    }
    for (std::size_t c = 0; c < hit.size(); ++c) {
        if (!hit[c]) throw Error("pathological cover: ball " + std::to_string(c) + " contains no lattice point");
    }

    const auto mod = [stride](int v) { const int r = v % stride; return r < 0 ? r + stride : r; };
    dec.families.assign(static_cast<std::size_t>(stride) * stride * stride, {});
    for (const Node& nd : nodes) {
        std::size_t best = cover.centers.size();
        double best_d = 1e300;
        for_near(nd.x, [&](std::size_t c) {
            const double d = norm(nd.x - cover.centers[c]);
            if (d < best_d || (d == best_d && c < best)) {
                best_d = d;
                best = c;
            }
        });
        if (best == cover.centers.size() || best_d > R) {
            throw Error("lattice point not covered by any ball of the cover");
        }
        dec.families[(static_cast<std::size_t>(mod(nd.k)) * stride + mod(nd.j)) * stride + mod(nd.i)].push_back(best);
    }

    dec.min_family_distance = 1e300;
    for (auto& fam : dec.families) {
        std::sort(fam.begin(), fam.end());
        fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
        for (std::size_t p = 0; p < fam.size(); ++p)
            for (std::size_t q = p + 1; q < fam.size(); ++q) {
                dec.min_family_distance =
                    std::min(dec.min_family_distance, norm(cover.centers[fam[p]] - cover.centers[fam[q]]));
            }
    }
    dec.disjoint = dec.min_family_distance >= 4.0 * R * (1.0 - 1e-12);
    return dec;
}

std::vector<double> dyadic_scales(double R0, int k_min, int k_max)
{
    if (k_min > k_max || k_max > 0) throw PreconditionError("dyadic scales need k_min <= k_max <= 0");
    std::vector<double> out;
    for (int k = k_max; k >= k_min; --k) out.push_back(std::ldexp(R0, k));
    return out;
}

void write_cover(const Cover& cover, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.precision(17);
    out << cover.R0 << ' ' << cover.R << ' ' << cover.K1 << ' ' << cover.K2 << ' ' << cover.n() << '\n';
    for (const Vec3& x : cover.centers) out << x.x << ' ' << x.y << ' ' << x.z << '\n';
    if (!out) throw Error("write to '" + path + "' failed");
}

Cover read_cover(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    Cover cover;
    std::size_t n = 0;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("cover file is empty");
    {
        std::istringstream hs(line);
        if (!(hs >> cover.R0 >> cover.R >> cover.K1 >> cover.K2 >> n)) {
            throw FormatError("cover header must read 'R0 R K1 K2 n'");
        }
    }
    if (!(cover.R0 > 0.0) || !(cover.R > 0.0) || cover.R > cover.R0) throw FormatError("cover header radii invalid");
    cover.centers.reserve(n);
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        Vec3 x;
        if (!(ls >> x.x >> x.y >> x.z)) throw FormatError("cover line must read 'x y z'");
        cover.centers.push_back(x);
    }
    if (cover.centers.size() != n) {
        throw FormatError("cover header claims " + std::to_string(n) + " centers, file has " +
                          std::to_string(cover.centers.size()));
    }
    return cover;
}

}  // namespace cascade
