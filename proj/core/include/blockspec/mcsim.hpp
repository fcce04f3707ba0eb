#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "blockspec/density.hpp"
#include "blockspec/model.hpp"

namespace blockspec {

struct SimConfig {
    int N = 100;        // block size unit; actual N_i = N * p_i from the profile
    int reps = 100;     // independent realizations
    std::uint64_t seed = 1;
    int bins = 60;
    int threads = 1;
};

struct Histogram {
    std::vector<double> bin_edges;  // bins + 1 sorted edges
    std::vector<double> masses;     // sums to 1
    std::int64_t n_samples = 0;
};

// ---------------------------------------------------------------------------
// Deterministic Gaussian streams
// ---------------------------------------------------------------------------

/// Counter-based per-(name, rep) stream: reps are order-independent and
/// parallel-safe, and the draws do not depend on the standard library's
/// normal_distribution implementation.
class GaussianStream {
public:
    GaussianStream(std::uint64_t master_seed, std::uint64_t name_index,
                   std::uint64_t rep_index);

    double next();  // standard normal

private:
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One finite-N realization of the self-adjoint block matrix X (Hermitian by
/// construction; entry covariances are exactly delta delta sigma / n).
Matrix sample_matrix(const ModelSpec& spec, const SimConfig& cfg, int rep_index);

/// One realization of the rectangular H (M x N, entries at variance
/// |scale|^2 / n with n = M + N).
Matrix sample_wishart_H(const WishartSpec& w, const SimConfig& cfg, int rep_index);

struct SpectrumResult {
    Histogram hist;
    SpectralMoments moments;  // pooled eigenvalue moments, orders 1..8
    double wall_time_seconds = 0.0;
};

SpectrumResult empirical_spectrum(const ModelSpec& spec, const SimConfig& cfg);
SpectrumResult empirical_spectrum(const WishartSpec& w, const SimConfig& cfg);

struct CompareReport {
    double l1 = 0.0;       // sum_bins |curve mass - hist mass|
    double sup_bin = 0.0;  // max over bins
    std::vector<double> moment_gaps;  // orders 1..6
};

CompareReport compare(const DensityCurve& curve, const Histogram& hist);

void write_histogram_csv(std::ostream& os, const Histogram& hist);
Histogram read_histogram_csv(std::istream& is);

// ---------------------------------------------------------------------------
// Symbolic audit hooks
// ---------------------------------------------------------------------------

/// A big-matrix entry written as a complex linear combination of the
/// underlying independent real unit Gaussians; E[x y] is then an exact sum
/// of coefficient products. Used by the covariance audit tests to check the
/// sampler's construction analytically rather than by sampling.
struct SymbolicEntry {
    std::map<std::uint64_t, Complex> coeffs;  // base-variable id -> coefficient
};

std::vector<std::vector<SymbolicEntry>> symbolic_matrix(const ModelSpec& spec, int N_unit);

/// E[a b] (no conjugation) of two symbolic entries.
Complex symbolic_cov(const SymbolicEntry& a, const SymbolicEntry& b);

}  // namespace blockspec
