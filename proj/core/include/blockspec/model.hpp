#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockspec/types.hpp"

namespace blockspec {

// ============================================================================
// Covariance tensor sigma(i,j;k,l)
// ============================================================================

/// The 4-index covariance array of a Gaussian block family, stored sparsely
/// (only nonzero entries). Indices are 0-based internally; error messages and
/// the file format use 1-based indices.
class CovarianceTensor {
public:
    struct Entry {
        int i, j, k, l;
        Complex value;
    };

    CovarianceTensor() : d_(0) {}
    explicit CovarianceTensor(int d) : d_(d) {
        if (d <= 0) throw ValidationError("covariance tensor needs d >= 1");
    }

    int dim() const { return d_; }

    void set(int i, int j, int k, int l, Complex v);
    Complex sigma(int i, int j, int k, int l) const;

    const std::vector<Entry>& nonzeros() const { return entries_; }
    bool empty() const { return entries_.empty(); }

private:
    std::vector<Entry>::const_iterator find(int i, int j, int k, int l) const;

    int d_;
    std::vector<Entry> entries_;  // sorted by (i,j,k,l)
};

// ============================================================================
// Dimension profile
// ============================================================================

/// Block side lengths, kept as exact rationals alpha_i = N_i / n so that
/// sum(alpha) == 1 holds exactly. Square mode is alpha_i = 1/d.
class DimensionProfile {
public:
    enum class Mode { Square, Rectangular };

    static DimensionProfile square(int d);
    static DimensionProfile rectangular(const std::vector<std::int64_t>& sizes);
    static DimensionProfile rectangular_alpha(const std::vector<Rational>& alpha);

    Mode mode() const { return mode_; }
    int dim() const { return static_cast<int>(alpha_.size()); }
    const std::vector<Rational>& alpha() const { return alpha_; }
    double alpha_value(int i) const { return alpha_[i].value(); }

    /// Integer block sizes at overall scale `unit`: N_i = unit * p_i with the
    /// common denominator q, so n = unit * q.
    std::vector<int> block_sizes(int unit) const;
    std::int64_t size_denominator() const;

    bool uniform() const;  // all alpha_i equal

private:
    DimensionProfile(Mode mode, std::vector<Rational> alpha);

    Mode mode_;
    std::vector<Rational> alpha_;
};

// ============================================================================
// Block grid
// ============================================================================

struct BlockName {
    std::string label;
    bool selfadjoint = false;
    /// Optional declared correlation with another (earlier, same-kind) name:
    /// entries of this block are rho * base + sqrt(1-rho^2) * fresh.
    std::optional<std::string> correlated_with;
    double rho = 0.0;
};

struct BlockRef {
    int name;        // index into names
    bool adjoint;    // true = the adjoint of the named block sits here
    double scale;    // real tap gain
};

/// Declarative d x d self-adjoint layout of named Gaussian blocks.
class BlockGrid {
public:
    BlockGrid(int d, std::vector<BlockName> names,
              std::vector<std::optional<BlockRef>> entries);

    int dim() const { return d_; }
    const std::vector<BlockName>& names() const { return names_; }
    const std::optional<BlockRef>& at(int i, int j) const { return entries_[i * d_ + j]; }

    int name_index(const std::string& label) const;

private:
    void validate() const;

    int d_;
    std::vector<BlockName> names_;
    std::vector<std::optional<BlockRef>> entries_;  // row-major d x d
};

// ============================================================================
// Model specs
// ============================================================================

/// A validated self-adjoint block-matrix model: covariance + dimensions,
/// plus the originating grid when one was given (the simulator needs it).
struct ModelSpec {
    CovarianceTensor cov;
    DimensionProfile dims;
    std::optional<BlockGrid> grid;  // absent for explicit-sigma specs

    bool square() const { return dims.mode() == DimensionProfile::Mode::Square; }
};

/// Rectangular grid H whose Gram matrix HH* is under study. Normalized at
/// construction to M <= N by transposing the grid when necessary.
class WishartSpec {
public:
    WishartSpec(int r, int s, std::vector<BlockName> names,
                std::vector<std::optional<BlockRef>> hgrid,
                std::vector<std::int64_t> row_sizes,
                std::vector<std::int64_t> col_sizes);

    int rows() const { return r_; }
    int cols() const { return s_; }
    const std::vector<BlockName>& names() const { return names_; }
    const std::optional<BlockRef>& at(int i, int j) const { return hgrid_[i * s_ + j]; }
    const std::vector<std::int64_t>& row_sizes() const { return row_sizes_; }
    const std::vector<std::int64_t>& col_sizes() const { return col_sizes_; }
    std::int64_t total_rows() const;
    std::int64_t total_cols() const;
    /// True when the input grid had M > N and the roles of H and H* were
    /// exchanged; the reported spectrum is then the one of the Gram matrix of
    /// the transposed (wide) orientation.
    bool swapped() const { return swapped_; }

    bool all_nonselfadjoint() const;
    bool equal_square_blocks() const;

private:
    int r_, s_;
    std::vector<BlockName> names_;
    std::vector<std::optional<BlockRef>> hgrid_;  // row-major r x s
    std::vector<std::int64_t> row_sizes_, col_sizes_;
    bool swapped_ = false;
};

/// Either flavour of parsed model.
struct AnySpec {
    std::optional<ModelSpec> model;
    std::optional<WishartSpec> wishart;
    bool is_wishart() const { return wishart.has_value(); }
};

// ============================================================================
// Operations
// ============================================================================

/// Covariance derivation rule: sigma(i,j;k,l) = scale(i,j)*conj(scale(l,k))
/// whenever entries (i,j) and (l,k) reference the same name with the same
/// adjoint flag (any flag for selfadjoint names), plus declared fractional
/// correlations between distinct names.
CovarianceTensor derive_sigma(const BlockGrid& grid);

struct SigmaViolation {
    std::string what;
};

/// Checks Hermitian symmetry sigma(i,j;k,l) == conj(sigma(k,l;i,j)) and, in
/// rectangular mode, the fitting condition (zero unless alpha_i == alpha_l
/// and alpha_j == alpha_k). Returns violations instead of throwing.
std::vector<SigmaViolation> validate_sigma(const CovarianceTensor& cov,
                                           const DimensionProfile& dims);

/// The (r+s)-block self-adjoint model for X = [[0, H], [H*, 0]].
ModelSpec build_wishart_embedding(const WishartSpec& w);

}  // namespace blockspec
