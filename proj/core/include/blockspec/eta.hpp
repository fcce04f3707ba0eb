#pragma once

#include <utility>
#include <vector>

#include "blockspec/model.hpp"
#include "blockspec/types.hpp"

namespace blockspec {

/// Stabilized entry pattern of the matrix-valued Cauchy transform: which
/// entries vanish identically and which coincide. The zero set and the
/// equality classes together partition the d x d index square.
struct PatternMask {
    int d = 0;
    std::vector<std::pair<int, int>> zero_set;
    std::vector<std::vector<std::pair<int, int>>> classes;

    /// Every entry in its own class, nothing forced to zero.
    static PatternMask trivial(int d);
};

/// The covariance mapping eta (square mode, weight 1/d) or eta_alpha
/// (rectangular mode, weight alpha_k), precompiled into a sparse
/// contraction plan: [eta(D)]_ij = sum_kl sigma(i,k;l,j) w_k d_kl.
class EtaMap {
public:
    EtaMap(const CovarianceTensor& cov, const DimensionProfile& dims);

    int dim() const { return d_; }
    bool rectangular() const { return rectangular_; }

    Matrix apply(const Matrix& D) const;

    /// Weighted trace matching the mode: (1/d) sum G_ii or sum alpha_i G_ii.
    Complex trace(const Matrix& G) const;

    /// In rectangular mode D must be supported on the square-block pattern
    /// (d_ij = 0 unless alpha_i == alpha_j); throws otherwise.
    void require_in_domain(const Matrix& D) const;

    /// Conservative upper bound on the operator norm of eta (spectral norm on
    /// matrices), with a 1.01 safety factor: the max of a power-iteration
    /// estimate on the induced d^2 x d^2 map, that map's max absolute row
    /// sum, and the top eigenvalue of the Hermitian part of eta(I).
    double norm_bound() const;

    const std::vector<double>& weights() const { return weights_; }
    const CovarianceTensor& cov() const { return cov_; }
    const DimensionProfile& dims() const { return dims_; }

private:
    struct Term {
        int k, l;
        Complex w;
    };

    int d_;
    bool rectangular_;
    CovarianceTensor cov_;
    DimensionProfile dims_;
    std::vector<double> weights_;
    std::vector<std::vector<Term>> plan_;  // per output entry (i*d + j)
    std::vector<bool> alpha_square_;       // alpha_i == alpha_j, row-major
};

EtaMap eta_for(const ModelSpec& spec);

Matrix eta_apply(const CovarianceTensor& cov, const Matrix& D);
Matrix eta_alpha_apply(const CovarianceTensor& cov, const DimensionProfile& dims,
                       const Matrix& D);
double eta_norm(const CovarianceTensor& cov,
                const DimensionProfile* dims = nullptr);

/// Runs D -> I + w eta(D) D from the identity (and randomly perturbed starts
/// at random complex weights w) until the entry pattern stabilizes, then
/// verifies the detected classes are preserved by the map, splitting any that
/// are not. Entries below 1e-12 across all runs form the zero set; entries
/// equal to 1e-9 relative across all runs share a class.
PatternMask detect_pattern(const EtaMap& eta);
PatternMask detect_pattern(const ModelSpec& spec);

}  // namespace blockspec
