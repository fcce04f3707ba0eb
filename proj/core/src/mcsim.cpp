#include "blockspec/mcsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "blockspec/parallel.hpp"

namespace blockspec {

// ---------------------------------------------------------------------------
// GaussianStream: splitmix-seeded xoshiro256** + Box-Muller
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

GaussianStream::GaussianStream(std::uint64_t master_seed, std::uint64_t name_index,
                               std::uint64_t rep_index) {
    std::uint64_t mix = master_seed;
    splitmix64(mix);
    mix ^= 0x632be59bd9b4e019ull * (name_index + 1);
    splitmix64(mix);
    mix ^= 0x9e6c63d0a2896b91ull * (rep_index + 1);
    for (auto& s : s_) s = splitmix64(mix);
}

double GaussianStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    auto u64 = [this] {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    };
    auto unit = [&] { return (static_cast<double>(u64() >> 11) + 0.5) * 0x1.0p-53; };
    const double u = unit();
    const double v = unit();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 6.28318530717958647692 * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

// ---------------------------------------------------------------------------
// Generic block assembly (numeric and symbolic share the construction)
// ---------------------------------------------------------------------------

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct NumericSource {
    using value_type = Complex;

    std::uint64_t seed;
    int rep;
    std::vector<std::unique_ptr<GaussianStream>> streams;

    NumericSource(std::uint64_t seed_, int rep_, int names) : seed(seed_), rep(rep_) {
        streams.resize(names);
    }
    value_type real_gauss(int name) {
        if (!streams[name])
            streams[name] = std::make_unique<GaussianStream>(
                seed, static_cast<std::uint64_t>(name), static_cast<std::uint64_t>(rep));
        return Complex(streams[name]->next(), 0.0);
    }
    static value_type scaled(const value_type& x, Complex c) { return x * c; }
    static value_type sum(const value_type& a, const value_type& b) { return a + b; }
    static value_type conjugated(const value_type& a) { return std::conj(a); }
    static value_type zero() { return Complex(0.0, 0.0); }
};

struct SymbolicSource {
    using value_type = SymbolicEntry;

    std::vector<std::uint64_t> counters;

    explicit SymbolicSource(int names) : counters(names, 0) {}
    value_type real_gauss(int name) {
        SymbolicEntry e;
        const std::uint64_t id =
            (static_cast<std::uint64_t>(name) << 40) | counters[name]++;
        e.coeffs[id] = Complex(1.0, 0.0);
        return e;
    }
    static value_type scaled(const value_type& x, Complex c) {
        SymbolicEntry out;
        for (const auto& [id, w] : x.coeffs) out.coeffs[id] = w * c;
        return out;
    }
    static value_type sum(const value_type& a, const value_type& b) {
        SymbolicEntry out = a;
        for (const auto& [id, w] : b.coeffs) out.coeffs[id] += w;
        return out;
    }
    static value_type conjugated(const value_type& a) {
        SymbolicEntry out;
        for (const auto& [id, w] : a.coeffs) out.coeffs[id] = std::conj(w);
        return out;
    }
    static value_type zero() { return SymbolicEntry{}; }
};

template <class Source>
using Block = std::vector<std::vector<typename Source::value_type>>;

/// Raw unit-variance block: selfadjoint names get the Hermitian construction
/// (complex Gaussians above the diagonal, real Gaussians on it), all others
/// are filled with i.i.d. complex Gaussians. Fixed draw order per name.
template <class Source>
Block<Source> raw_block(Source& src, int name, bool selfadjoint, int rows, int cols) {
    Block<Source> B(rows, std::vector<typename Source::value_type>(cols, Source::zero()));
    const Complex ire(kInvSqrt2, 0.0);
    const Complex iim(0.0, kInvSqrt2);
    if (selfadjoint) {
        for (int r = 0; r < rows; ++r)
            for (int p = r; p < cols; ++p) {
                if (p == r) {
                    B[r][p] = src.real_gauss(name);
                } else {
                    const auto x = src.real_gauss(name);
                    const auto y = src.real_gauss(name);
                    B[r][p] = Source::sum(Source::scaled(x, ire), Source::scaled(y, iim));
                    B[p][r] = Source::conjugated(B[r][p]);
                }
            }
    } else {
        for (int r = 0; r < rows; ++r)
            for (int p = 0; p < cols; ++p) {
                const auto x = src.real_gauss(name);
                const auto y = src.real_gauss(name);
                B[r][p] = Source::sum(Source::scaled(x, ire), Source::scaled(y, iim));
            }
    }
    return B;
}

struct NameShape {
    int rows = -1, cols = -1;
};

/// Raw blocks for every placed name, with declared correlations resolved:
/// correlated = rho * base + sqrt(1 - rho^2) * fresh.
template <class Source>
std::vector<Block<Source>> realize_names(Source& src, const std::vector<BlockName>& names,
                                         const std::vector<NameShape>& shapes) {
    std::vector<Block<Source>> raw(names.size());
    for (std::size_t t = 0; t < names.size(); ++t) {
        if (shapes[t].rows < 0) continue;  // name never placed
        raw[t] = raw_block(src, static_cast<int>(t), names[t].selfadjoint, shapes[t].rows,
                           shapes[t].cols);
    }
    std::vector<Block<Source>> out = raw;
    for (std::size_t t = 0; t < names.size(); ++t) {
        if (!names[t].correlated_with || shapes[t].rows < 0) continue;
        int base = -1;
        for (std::size_t b = 0; b < names.size(); ++b)
            if (names[b].label == *names[t].correlated_with) base = static_cast<int>(b);
        if (base < 0 || shapes[base].rows != shapes[t].rows ||
            shapes[base].cols != shapes[t].cols)
            throw ValidationError("correlated names must be placed with matching shapes");
        const double rho = names[t].rho;
        const double comp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        for (int r = 0; r < shapes[t].rows; ++r)
            for (int p = 0; p < shapes[t].cols; ++p)
                out[t][r][p] = Source::sum(Source::scaled(raw[base][r][p], Complex(rho, 0.0)),
                                           Source::scaled(raw[t][r][p], Complex(comp, 0.0)));
    }
    return out;
}

struct GridGeometry {
    std::vector<int> sizes;    // per block row/col
    std::vector<int> offsets;  // prefix sums
    int total = 0;
};

GridGeometry geometry(const std::vector<int>& sizes) {
    GridGeometry g;
    g.sizes = sizes;
    g.offsets.resize(sizes.size() + 1, 0);
    for (std::size_t t = 0; t < sizes.size(); ++t) g.offsets[t + 1] = g.offsets[t] + sizes[t];
    g.total = g.offsets.back();
    return g;
}

/// Shapes every placed name from its first placement and checks the rest.
std::vector<NameShape> shape_names(int d_rows, int d_cols,
                                   const std::vector<BlockName>& names,
                                   const std::function<const std::optional<BlockRef>&(int, int)>& at,
                                   const GridGeometry& rows, const GridGeometry& cols) {
    std::vector<NameShape> shapes(names.size());
    for (int i = 0; i < d_rows; ++i)
        for (int j = 0; j < d_cols; ++j) {
            const auto& e = at(i, j);
            if (!e) continue;
            int br = rows.sizes[i], bc = cols.sizes[j];
            if (e->adjoint) std::swap(br, bc);  // the name itself is bc x br placed adjoint
            NameShape& s = shapes[e->name];
            if (s.rows < 0) {
                s.rows = br;
                s.cols = bc;
            } else if (s.rows != br || s.cols != bc) {
                throw ValidationError("name " + names[e->name].label +
                                      " is placed with inconsistent block shapes");
            }
            if (names[e->name].selfadjoint && br != bc)
                throw ValidationError("selfadjoint name " + names[e->name].label +
                                      " placed on a non-square block");
        }
    return shapes;
}

template <class Source>
Block<Source> assemble(Source& src, int d_rows, int d_cols,
                       const std::vector<BlockName>& names,
                       const std::function<const std::optional<BlockRef>&(int, int)>& at,
                       const GridGeometry& rows, const GridGeometry& cols, double inv_sqrt_n) {
    const auto shapes = shape_names(d_rows, d_cols, names, at, rows, cols);
    const auto blocks = realize_names(src, names, shapes);

    Block<Source> X(rows.total,
                    std::vector<typename Source::value_type>(cols.total, Source::zero()));
    for (int i = 0; i < d_rows; ++i)
        for (int j = 0; j < d_cols; ++j) {
            const auto& e = at(i, j);
            if (!e) continue;
            const auto& B = blocks[e->name];
            const Complex c(e->scale * inv_sqrt_n, 0.0);
            const int r0 = rows.offsets[i];
            const int c0 = cols.offsets[j];
            for (int r = 0; r < rows.sizes[i]; ++r)
                for (int p = 0; p < cols.sizes[j]; ++p) {
                    const auto& v = e->adjoint ? B[p][r] : B[r][p];
                    X[r0 + r][c0 + p] =
                        e->adjoint ? Source::scaled(Source::conjugated(v), c)
                                   : Source::scaled(v, c);
                }
        }
    return X;
}

const BlockGrid& require_grid(const ModelSpec& spec) {
    if (!spec.grid)
        throw ValidationError("simulation needs a grid-based spec (explicit-sigma models "
                              "have no block realization)");
    return *spec.grid;
}

void require_valid(const SimConfig& cfg) {
    if (cfg.N < 1) throw ValidationError("simulation needs N >= 1");
    if (cfg.reps < 1) throw ValidationError("simulation needs reps >= 1");
}

Histogram make_histogram(std::vector<double>& pooled, int bins) {
    Histogram h;
    h.n_samples = static_cast<std::int64_t>(pooled.size());
    if (pooled.empty() || bins <= 0) return h;
    const auto [mn_it, mx_it] = std::minmax_element(pooled.begin(), pooled.end());
    double lo = *mn_it, hi = *mx_it;
    if (hi <= lo) hi = lo + 1e-12;
    const double pad = (hi - lo) * 1e-9;
    hi += pad;
    h.bin_edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b)
        h.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
    std::vector<std::int64_t> counts(bins, 0);
    for (double v : pooled) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++counts[b];
    }
    h.masses.resize(bins);
    for (int b = 0; b < bins; ++b)
        h.masses[b] = static_cast<double>(counts[b]) / static_cast<double>(h.n_samples);
    return h;
}

SpectrumResult spectrum_from_eigs(std::vector<std::vector<double>> per_rep, int bins) {
    SpectrumResult out;
    std::vector<double> pooled;
    for (auto& v : per_rep) pooled.insert(pooled.end(), v.begin(), v.end());
    out.hist = make_histogram(pooled, bins);
    for (int k = 1; k <= 8; ++k) {
        double acc = 0.0;
        for (double v : pooled) acc += std::pow(v, k);
        out.moments.orders.push_back(k);
        out.moments.values.push_back(pooled.empty() ? 0.0 : acc / pooled.size());
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public sampling API
// ---------------------------------------------------------------------------

Matrix sample_matrix(const ModelSpec& spec, const SimConfig& cfg, int rep_index) {
    require_valid(cfg);
    const BlockGrid& grid = require_grid(spec);
    const int d = grid.dim();
    const GridGeometry geo = geometry(spec.dims.block_sizes(cfg.N));
    NumericSource src(cfg.seed, rep_index, static_cast<int>(grid.names().size()));
    auto at = [&grid](int i, int j) -> const std::optional<BlockRef>& {
        return grid.at(i, j);
    };
    const auto X = assemble(src, d, d, grid.names(), at, geo, geo,
                            1.0 / std::sqrt(static_cast<double>(geo.total)));
    Matrix M(geo.total, geo.total);
    for (int r = 0; r < geo.total; ++r)
        for (int c = 0; c < geo.total; ++c) M(r, c) = X[r][c];
    return M;
}

Matrix sample_wishart_H(const WishartSpec& w, const SimConfig& cfg, int rep_index) {
    require_valid(cfg);
    std::vector<int> rs, cs;
    for (auto v : w.row_sizes()) rs.push_back(static_cast<int>(v) * cfg.N);
    for (auto v : w.col_sizes()) cs.push_back(static_cast<int>(v) * cfg.N);
    const GridGeometry rg = geometry(rs);
    const GridGeometry cg = geometry(cs);
    NumericSource src(cfg.seed, rep_index, static_cast<int>(w.names().size()));
    auto at = [&w](int i, int j) -> const std::optional<BlockRef>& { return w.at(i, j); };
    const double n = static_cast<double>(rg.total + cg.total);
    const auto H = assemble(src, w.rows(), w.cols(), w.names(), at, rg, cg,
                            1.0 / std::sqrt(n));
    Matrix M(rg.total, cg.total);
    for (int r = 0; r < rg.total; ++r)
        for (int c = 0; c < cg.total; ++c) M(r, c) = H[r][c];
    return M;
}

std::vector<std::vector<SymbolicEntry>> symbolic_matrix(const ModelSpec& spec, int N_unit) {
    const BlockGrid& grid = require_grid(spec);
    const int d = grid.dim();
    const GridGeometry geo = geometry(spec.dims.block_sizes(N_unit));
    SymbolicSource src(static_cast<int>(grid.names().size()));
    auto at = [&grid](int i, int j) -> const std::optional<BlockRef>& {
        return grid.at(i, j);
    };
    return assemble(src, d, d, grid.names(), at, geo, geo,
                    1.0 / std::sqrt(static_cast<double>(geo.total)));
}

Complex symbolic_cov(const SymbolicEntry& a, const SymbolicEntry& b) {
    Complex acc(0.0, 0.0);
    for (const auto& [id, w] : a.coeffs) {
        const auto it = b.coeffs.find(id);
        if (it != b.coeffs.end()) acc += w * it->second;  // E[xi^2] = 1, independent
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

SpectrumResult empirical_spectrum(const ModelSpec& spec, const SimConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<double>> eigs(cfg.reps);
    parallel_for(cfg.reps, cfg.threads, [&](int rep) {
        const Matrix X = sample_matrix(spec, cfg, rep);
        Eigen::SelfAdjointEigenSolver<Matrix> es(X, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        eigs[rep].assign(ev.data(), ev.data() + ev.size());
    });
    SpectrumResult out = spectrum_from_eigs(std::move(eigs), cfg.bins);
    out.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

SpectrumResult empirical_spectrum(const WishartSpec& w, const SimConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<double>> eigs(cfg.reps);
    parallel_for(cfg.reps, cfg.threads, [&](int rep) {
        const Matrix H = sample_wishart_H(w, cfg, rep);
        const Matrix G = H * H.adjoint();
        Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        eigs[rep].assign(ev.data(), ev.data() + ev.size());
    });
    SpectrumResult out = spectrum_from_eigs(std::move(eigs), cfg.bins);
    out.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

CompareReport compare(const DensityCurve& curve, const Histogram& hist) {
    CompareReport rep;
    const int bins = static_cast<int>(hist.masses.size());
    for (int b = 0; b < bins; ++b) {
        double cm = integrate_curve(curve, hist.bin_edges[b], hist.bin_edges[b + 1]);
        if (curve.atom0 != 0.0 && hist.bin_edges[b] <= 0.0 && 0.0 < hist.bin_edges[b + 1])
            cm += curve.atom0;
        const double gap = std::abs(cm - hist.masses[b]);
        rep.l1 += gap;
        rep.sup_bin = std::max(rep.sup_bin, gap);
    }
    const SpectralMoments cmom = curve_moments(curve, 6);
    for (int k = 1; k <= 6; ++k) {
        double hm = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double mid = 0.5 * (hist.bin_edges[b] + hist.bin_edges[b + 1]);
            hm += hist.masses[b] * std::pow(mid, k);
        }
        rep.moment_gaps.push_back(std::abs(cmom.order(k) - hm));
    }
    return rep;
}

void write_histogram_csv(std::ostream& os, const Histogram& hist) {
    os << "bin_left,bin_right,mass\n";
    char buf[120];
    for (std::size_t b = 0; b < hist.masses.size(); ++b) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", hist.bin_edges[b],
                      hist.bin_edges[b + 1], hist.masses[b]);
        os << buf;
    }
}

Histogram read_histogram_csv(std::istream& is) {
    Histogram h;
    std::string line;
    if (!std::getline(is, line) || line.rfind("bin_left,bin_right,mass", 0) != 0)
        throw ValidationError("histogram CSV must start with a 'bin_left,bin_right,mass' header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ValidationError("malformed histogram CSV line: " + line);
        const double left = std::stod(line.substr(0, c1));
        const double right = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        const double mass = std::stod(line.substr(c2 + 1));
        if (h.bin_edges.empty()) h.bin_edges.push_back(left);
        h.bin_edges.push_back(right);
        h.masses.push_back(mass);
    }
    return h;
}

}  // namespace blockspec
