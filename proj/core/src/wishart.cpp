#include "blockspec/wishart.hpp"

#include <cmath>
#include <functional>

#include "blockspec/parallel.hpp"

namespace blockspec {

namespace {

struct EmbeddedContext {
    ModelSpec spec;
    EtaMap eta;
    PatternMask mask;
    double nu;
    double theta;
    double theta0;

    explicit EmbeddedContext(const WishartSpec& w)
        : spec(build_wishart_embedding(w)), eta(eta_for(spec)),
          mask(detect_pattern(eta)), nu(eta.norm_bound()) {
        double row_alpha = 0.0;
        for (int i = 0; i < w.rows(); ++i) row_alpha += spec.dims.alpha_value(i);
        theta = 1.0 / (2.0 * row_alpha);
        theta0 = ((1.0 - row_alpha) - row_alpha) / (2.0 * row_alpha);
    }
};

WishartSolution package(const EmbeddedContext& ctx, const WishartSpec& w, PointResult sol) {
    const int r = w.rows();
    const int s = w.cols();
    WishartSolution out;
    out.z = sol.z;
    out.H_matrix = std::move(sol.G);
    out.G1 = out.H_matrix.topLeftCorner(r, r);
    out.G2 = out.H_matrix.bottomRightCorner(s, s);
    out.alpha.resize(r + s);
    for (int i = 0; i < r + s; ++i) out.alpha[i] = ctx.spec.dims.alpha_value(i);
    out.theta = ctx.theta;
    out.theta0 = ctx.theta0;
    out.residual = sol.residual;
    out.iterations = sol.iterations;
    out.offdiag_norm = std::max(max_abs(out.H_matrix.topRightCorner(r, s)),
                                max_abs(out.H_matrix.bottomLeftCorner(s, r)));
    out.r = r;
    out.s = s;
    return out;
}

}  // namespace

WishartSolution solve_wishart_point(const WishartSpec& w, Complex z,
                                    const SolverOptions& opts) {
    EmbeddedContext ctx(w);
    const WishartEquation eq(&ctx.eta);
    detail::FixedPointEngine engine(&eq, ctx.mask, opts, ctx.nu);
    return package(ctx, w, engine.solve_robust(z, nullptr));
}

WishartGridResult solve_wishart_grid(const WishartSpec& w, const std::vector<double>& xs,
                                     double epsilon, const SolverOptions& opts) {
    if (epsilon <= 0.0) throw ValidationError("epsilon must be positive");
    EmbeddedContext ctx(w);
    const WishartEquation eq(&ctx.eta);
    detail::FixedPointEngine engine(&eq, ctx.mask, opts, ctx.nu);

    const int n = static_cast<int>(xs.size());
    WishartGridResult out;
    if (n == 0) return out;
    const int chunks = std::max(1, std::min(opts.threads, n));
    std::vector<WishartGridResult> partial(chunks);

    parallel_for(chunks, chunks, [&](int c) {
        const int lo = static_cast<int>(static_cast<std::int64_t>(n) * c / chunks);
        const int hi = static_cast<int>(static_cast<std::int64_t>(n) * (c + 1) / chunks);
        WishartGridResult& res = partial[c];
        Matrix seed;
        bool have_seed = false;
        for (int t = lo; t < hi; ++t) {
            const Complex z(xs[t], epsilon);
            try {
                PointResult sol = have_seed ? engine.solve_robust(z, &seed)
                                            : engine.descend(xs[t], epsilon, 2.0);
                seed = sol.G;
                have_seed = true;
                res.points.push_back(package(ctx, w, std::move(sol)));
            } catch (const SolveError& e) {
                res.failures.push_back(GridFailure{z, e.what()});
            }
        }
    });

    for (auto& p : partial) {
        out.points.insert(out.points.end(), std::make_move_iterator(p.points.begin()),
                          std::make_move_iterator(p.points.end()));
        out.failures.insert(out.failures.end(), p.failures.begin(), p.failures.end());
    }
    return out;
}

Complex recover_GHH_pole_route(const WishartSolution& sol) {
    // theta tr_alpha H - theta0 / z; the subtracted pole carries exactly the
    // spurious zeros that H*H contributes to the squared law.
    const int d = sol.r + sol.s;
    Complex tr(0.0, 0.0);
    for (int i = 0; i < d; ++i) tr += sol.alpha[i] * sol.H_matrix(i, i);
    return sol.theta * tr - sol.theta0 / sol.z;
}

Complex recover_GHH(const WishartSolution& sol) {
    if (sol.offdiag_norm <= 1e-10) {
        // Row-size-weighted trace of G1; the plain normalized trace when all
        // row blocks share one size.
        double row_alpha = 0.0;
        Complex acc(0.0, 0.0);
        for (int i = 0; i < sol.r; ++i) {
            row_alpha += sol.alpha[i];
            acc += sol.alpha[i] * sol.G1(i, i);
        }
        return acc / row_alpha;
    }
    return recover_GHH_pole_route(sol);
}

Matrix solve_reduced_G1(const WishartSpec& w, Complex z, const SolverOptions& opts) {
    if (!w.all_nonselfadjoint())
        throw ValidationError("reduced path requires all blocks non-selfadjoint");
    if (!w.equal_square_blocks())
        throw ValidationError("reduced path requires one common square block size");

    EmbeddedContext ctx(w);
    const int r = w.rows();
    const int s = w.cols();
    const int d = r + s;

    // eta1: M_r -> M_s and eta2: M_s -> M_r as restrictions of the embedded
    // map; eta swaps the two diagonal corners.
    auto eta1 = [&](const Matrix& D1) {
        Matrix big = Matrix::Zero(d, d);
        big.topLeftCorner(r, r) = D1;
        return Matrix(ctx.eta.apply(big).bottomRightCorner(s, s));
    };
    auto eta2 = [&](const Matrix& D2) {
        Matrix big = Matrix::Zero(d, d);
        big.bottomRightCorner(s, s) = D2;
        return Matrix(ctx.eta.apply(big).topLeftCorner(r, r));
    };

    class ReducedEquation final : public Equation {
    public:
        ReducedEquation(int r, int s, std::function<Matrix(const Matrix&)> e1,
                        std::function<Matrix(const Matrix&)> e2)
            : r_(r), s_(s), eta1_(std::move(e1)), eta2_(std::move(e2)) {}

        int dim() const override { return r_; }

        Matrix wmat(const Matrix& G1) const {
            const Matrix A = Matrix::Identity(s_, s_) - eta1_(G1);
            Eigen::FullPivLU<Matrix> lu(A);
            if (!lu.isInvertible())
                throw SolveError(SolveError::Kind::SingularJacobian,
                                 "reduced path: I - eta1(G1) is singular");
            return lu.inverse();
        }

        Matrix F(const Matrix& G, Complex z) const override {
            return eta2_(wmat(G)) * G - z * G + Matrix::Identity(r_, r_);
        }
        Matrix dF(const Matrix& G, const Matrix& E, Complex z) const override {
            const Matrix W = wmat(G);
            return eta2_(W * eta1_(E) * W) * G + eta2_(W) * E - z * E;
        }
        Matrix fp_step(const Matrix& G, Complex z) const override {
            const Matrix A = z * Matrix::Identity(r_, r_) - eta2_(wmat(G));
            Eigen::FullPivLU<Matrix> lu(A);
            if (!lu.isInvertible()) return G;
            return lu.inverse();
        }

    private:
        int r_, s_;
        std::function<Matrix(const Matrix&)> eta1_, eta2_;
    };

    const ReducedEquation eq(r, s, eta1, eta2);
    detail::FixedPointEngine engine(&eq, PatternMask::trivial(r), opts, ctx.nu);
    // Always arrive by descent: the eliminated equation keeps the same branch
    // structure, so the homotopy argument applies unchanged.
    if (z.imag() <= 0.0) throw ValidationError("solve requires Im(z) > 0");
    PointResult sol = engine.descend(z.real(), z.imag(), 2.0);
    return sol.G;
}

}  // namespace blockspec
