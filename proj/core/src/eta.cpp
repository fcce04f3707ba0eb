#include "blockspec/eta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

namespace blockspec {

// ---------------------------------------------------------------------------
// PatternMask
// ---------------------------------------------------------------------------

PatternMask PatternMask::trivial(int d) {
    PatternMask m;
    m.d = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m.classes.push_back({{i, j}});
    return m;
}

// ---------------------------------------------------------------------------
// EtaMap
// ---------------------------------------------------------------------------

EtaMap::EtaMap(const CovarianceTensor& cov, const DimensionProfile& dims)
    : d_(cov.dim()),
      rectangular_(dims.mode() == DimensionProfile::Mode::Rectangular),
      cov_(cov), dims_(dims) {
    if (dims.dim() != d_) throw ValidationError("eta: sigma and alpha dimensions differ");

    weights_.resize(d_);
    for (int k = 0; k < d_; ++k)
        weights_[k] = rectangular_ ? dims.alpha_value(k) : 1.0 / d_;

    plan_.resize(static_cast<std::size_t>(d_) * d_);
    // [eta(D)]_ij picks up sigma(i,k;l,j): regroup the sparse tensor by (i,j).
    for (const auto& e : cov_.nonzeros()) {
        const int i = e.i, k = e.j, l = e.k, j = e.l;
        plan_[static_cast<std::size_t>(i) * d_ + j].push_back(Term{k, l, e.value * weights_[k]});
    }

    alpha_square_.assign(static_cast<std::size_t>(d_) * d_, true);
    if (rectangular_) {
        const auto& a = dims.alpha();
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j)
                alpha_square_[static_cast<std::size_t>(i) * d_ + j] = (a[i] == a[j]);
    }
}

Matrix EtaMap::apply(const Matrix& D) const {
    if (D.rows() != d_ || D.cols() != d_) throw ValidationError("eta: dimension mismatch");
    Matrix out = Matrix::Zero(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) {
            Complex acc(0.0, 0.0);
            for (const auto& t : plan_[static_cast<std::size_t>(i) * d_ + j])
                acc += t.w * D(t.k, t.l);
            out(i, j) = acc;
        }
    return out;
}

Complex EtaMap::trace(const Matrix& G) const {
    Complex acc(0.0, 0.0);
    for (int i = 0; i < d_; ++i) acc += weights_[i] * G(i, i);
    if (!rectangular_) return acc;  // weights already 1/d in square mode
    return acc;
}

void EtaMap::require_in_domain(const Matrix& D) const {
    if (!rectangular_) return;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
            if (!alpha_square_[static_cast<std::size_t>(i) * d_ + j] &&
                std::abs(D(i, j)) > 1e-14)
                throw ValidationError("matrix outside the square-block domain M_alpha at entry (" +
                                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
}

double EtaMap::norm_bound() const {
    if (cov_.empty()) return 0.0;

    // Max absolute row sum of the induced d^2 x d^2 matrix.
    double row_sum = 0.0;
    for (const auto& terms : plan_) {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.w);
        row_sum = std::max(row_sum, s);
    }

    // Power iteration on the induced map (Frobenius inner product).
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix v(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) v(i, j) = Complex(unif(rng), unif(rng));
    v /= v.norm();
    double rho = 0.0;
    for (int it = 0; it < 200; ++it) {
        Matrix w = apply(v);
        const double nw = w.norm();
        if (nw < 1e-300) { rho = 0.0; break; }
        rho = nw;
        v = w / nw;
    }

    // For positive eta the operator norm equals ||eta(I)||; eta(I) is
    // Hermitian whenever sigma satisfies its symmetry constraint.
    const Matrix eI = apply(Matrix::Identity(d_, d_));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (eI + eI.adjoint()),
                                             Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();

    return 1.01 * std::max({rho, row_sum, top});
}

EtaMap eta_for(const ModelSpec& spec) { return EtaMap(spec.cov, spec.dims); }

Matrix eta_apply(const CovarianceTensor& cov, const Matrix& D) {
    return EtaMap(cov, DimensionProfile::square(cov.dim())).apply(D);
}

Matrix eta_alpha_apply(const CovarianceTensor& cov, const DimensionProfile& dims,
                       const Matrix& D) {
    EtaMap eta(cov, dims);
    eta.require_in_domain(D);
    return eta.apply(D);
}

double eta_norm(const CovarianceTensor& cov, const DimensionProfile* dims) {
    if (dims) return EtaMap(cov, *dims).norm_bound();
    return EtaMap(cov, DimensionProfile::square(cov.dim())).norm_bound();
}

// ---------------------------------------------------------------------------
// Pattern detection
// ---------------------------------------------------------------------------

namespace {

constexpr double kZeroTol = 1e-12;
constexpr double kEqTol = 1e-9;

bool approx_equal(Complex a, Complex b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-30});
    return std::abs(a - b) <= kEqTol * scale;
}

/// Refines `groups` (index sets over entries) so that members of one group
/// carry approximately equal values in `vals`.
void refine_by_values(std::vector<std::vector<int>>& groups,
                      const std::vector<Complex>& vals) {
    std::vector<std::vector<int>> next;
    for (auto& g : groups) {
        std::vector<int> rest = g;
        while (!rest.empty()) {
            std::vector<int> cls{rest.front()};
            std::vector<int> keep;
            for (std::size_t t = 1; t < rest.size(); ++t) {
                if (approx_equal(vals[rest[t]], vals[rest.front()])) cls.push_back(rest[t]);
                else keep.push_back(rest[t]);
            }
            next.push_back(std::move(cls));
            rest = std::move(keep);
        }
    }
    groups = std::move(next);
}

}  // namespace

PatternMask detect_pattern(const EtaMap& eta) {
    const int d = eta.dim();
    const int n2 = d * d;
    const int iters = 2 * d;
    const double nu = eta.norm_bound();
    // Weight small enough that the quadratic iteration is a contraction;
    // start perturbations then decay below both thresholds within 2d steps.
    const double wmag = 0.05 / std::max(1.0, nu * nu);

    std::mt19937_64 rng(0x51f0a2b4c6d8e01bull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    auto run = [&](Complex w, double perturb) {
        Matrix D = Matrix::Identity(d, d);
        if (perturb > 0.0) {
            Matrix P(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) P(i, j) = Complex(unif(rng), unif(rng));
            D += perturb * 0.5 * (P + P.adjoint());
        }
        for (int it = 0; it < iters; ++it)
            D = Matrix::Identity(d, d) + w * (eta.apply(D) * D);
        return D;
    };

    std::vector<Complex> weights{Complex(wmag, 0.0)};
    for (int t = 0; t < 3; ++t) {
        const double theta = unif(rng) * 3.141592653589793;
        weights.push_back(wmag * Complex(std::cos(theta), std::sin(theta)));
    }

    // Structural zeros never leave zero when the iteration starts at the
    // identity; a coincidental zero cannot survive four random weights.
    std::vector<Matrix> finals;
    for (const Complex w : weights) finals.push_back(run(w, 0.0));
    std::vector<bool> zero(n2, true);
    for (const auto& D : finals)
        for (int e = 0; e < n2; ++e)
            if (std::abs(D(e / d, e % d)) >= kZeroTol) zero[e] = false;

    // Perturbed starts only sharpen the equality classes: the contraction
    // washes the perturbation out for genuinely equal entries while any
    // coincidental agreement breaks by ~1e-6.
    for (int t = 1; t < 4; ++t) finals.push_back(run(weights[t], 1e-6));

    std::vector<std::vector<int>> groups;
    {
        std::vector<int> nonzero;
        for (int e = 0; e < n2; ++e)
            if (!zero[e]) nonzero.push_back(e);
        if (!nonzero.empty()) groups.push_back(std::move(nonzero));
    }
    for (const auto& D : finals) {
        std::vector<Complex> vals(n2);
        for (int e = 0; e < n2; ++e) vals[e] = D(e / d, e % d);
        refine_by_values(groups, vals);
    }

    // Closure: the detected classes must be preserved by D -> I + w eta(D) D
    // for class-consistent inputs, not just along the trajectory above.
    const Complex w0(wmag, 0.0);
    for (int round = 0; round < 32; ++round) {
        Matrix D = Matrix::Zero(d, d);
        for (const auto& g : groups) {
            const Complex v(unif(rng), unif(rng));
            for (int e : g) D(e / d, e % d) = v;
        }
        const Matrix E = Matrix::Identity(d, d) + w0 * (eta.apply(D) * D);

        bool changed = false;
        for (int e = 0; e < n2; ++e)
            if (zero[e] && std::abs(E(e / d, e % d)) >= kZeroTol) {
                zero[e] = false;
                groups.push_back({e});
                changed = true;
            }
        std::vector<Complex> vals(n2);
        for (int e = 0; e < n2; ++e) vals[e] = E(e / d, e % d);
        const std::size_t before = groups.size();
        refine_by_values(groups, vals);
        if (groups.size() != before) changed = true;
        if (!changed && round >= 3) break;  // a few confirming rounds
    }

    PatternMask mask;
    mask.d = d;
    for (int e = 0; e < n2; ++e)
        if (zero[e]) mask.zero_set.emplace_back(e / d, e % d);
    for (const auto& g : groups) {
        std::vector<std::pair<int, int>> cls;
        for (int e : g) cls.emplace_back(e / d, e % d);
        std::sort(cls.begin(), cls.end());
        mask.classes.push_back(std::move(cls));
    }
    std::sort(mask.classes.begin(), mask.classes.end());
    return mask;
}

PatternMask detect_pattern(const ModelSpec& spec) { return detect_pattern(eta_for(spec)); }

}  // namespace blockspec
