#include "blockspec/solver.hpp"

#include <algorithm>
#include <cmath>

#include "blockspec/parallel.hpp"

namespace blockspec {

// ---------------------------------------------------------------------------
// Equations
// ---------------------------------------------------------------------------

Matrix SemicircularEquation::F(const Matrix& G, Complex z) const {
    const int d = dim();
    return eta_->apply(G) * G - z * G + Matrix::Identity(d, d);
}

Matrix SemicircularEquation::dF(const Matrix& G, const Matrix& E, Complex z) const {
    return eta_->apply(E) * G + eta_->apply(G) * E - z * E;
}

Matrix SemicircularEquation::fp_step(const Matrix& G, Complex z) const {
    const int d = dim();
    const Matrix A = z * Matrix::Identity(d, d) - eta_->apply(G);
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) return G;
    return lu.inverse();
}

Matrix WishartEquation::F(const Matrix& G, Complex z) const {
    const int d = dim();
    return z * (eta_->apply(G) * G) - z * G + Matrix::Identity(d, d);
}

Matrix WishartEquation::dF(const Matrix& G, const Matrix& E, Complex z) const {
    return z * (eta_->apply(E) * G + eta_->apply(G) * E) - z * E;
}

Matrix WishartEquation::fp_step(const Matrix& G, Complex z) const {
    const int d = dim();
    const Matrix A = z * (Matrix::Identity(d, d) - eta_->apply(G));
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) return G;
    return lu.inverse();
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

namespace detail {

FixedPointEngine::FixedPointEngine(const Equation* eq, PatternMask mask, SolverOptions opts,
                                   double eta_norm_bound)
    : eq_(eq), mask_(std::move(mask)), opts_(opts), nu_(eta_norm_bound) {
    if (mask_.d != eq_->dim()) mask_ = PatternMask::trivial(eq_->dim());
}

double FixedPointEngine::descent_top() const { return 4.0 * (1.0 + nu_); }

Matrix FixedPointEngine::warmup(Complex z) const {
    const int d = eq_->dim();
    Matrix G = Matrix::Identity(d, d) / z;
    for (int it = 0; it < opts_.warmup_iterations; ++it) G = eq_->fp_step(G, z);
    return G;
}

PointResult FixedPointEngine::newton(Complex z, Matrix G) const {
    const int d = eq_->dim();
    const auto& classes = mask_.classes;
    const int C = static_cast<int>(classes.size());

    // Class representatives: average the seed over each class, zero the
    // zero set, so the iterate respects the mask from the start.
    Eigen::VectorXcd u(C);
    for (int c = 0; c < C; ++c) {
        Complex acc(0.0, 0.0);
        for (auto [i, j] : classes[c]) acc += G(i, j);
        u(c) = acc / static_cast<double>(classes[c].size());
    }
    auto assemble = [&](const Eigen::VectorXcd& vals) {
        Matrix out = Matrix::Zero(d, d);
        for (int c = 0; c < C; ++c)
            for (auto [i, j] : classes[c]) out(i, j) = vals(c);
        return out;
    };
    auto project = [&](const Matrix& M) {
        Eigen::VectorXcd r(C);
        for (int c = 0; c < C; ++c) {
            Complex acc(0.0, 0.0);
            for (auto [i, j] : classes[c]) acc += M(i, j);
            r(c) = acc / static_cast<double>(classes[c].size());
        }
        return r;
    };

    G = assemble(u);
    double res = max_abs(eq_->F(G, z));
    int it = 0;
    while (res > opts_.newton_tol && it < opts_.max_newton) {
        Eigen::MatrixXcd J(C, C);
        for (int c = 0; c < C; ++c) {
            Matrix basis = Matrix::Zero(d, d);
            for (auto [i, j] : classes[c]) basis(i, j) = 1.0;
            J.col(c) = project(eq_->dF(G, basis, z));
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(J);
        if (!lu.isInvertible())
            throw SolveError(SolveError::Kind::SingularJacobian,
                             "singular Newton Jacobian at z = (" + std::to_string(z.real()) +
                                 ", " + std::to_string(z.imag()) + ")");
        const Eigen::VectorXcd du = lu.solve(-project(eq_->F(G, z)));
        u += du;
        G = assemble(u);
        res = max_abs(eq_->F(G, z));
        ++it;
        if (du.cwiseAbs().maxCoeff() <= opts_.step_tol) break;
    }

    if (res > opts_.accept_residual)
        throw SolveError(SolveError::Kind::NonConvergence,
                         "Newton did not converge at z = (" + std::to_string(z.real()) + ", " +
                             std::to_string(z.imag()) + "); residual " + std::to_string(res));
    return PointResult{z, std::move(G), res, it};
}

PointResult FixedPointEngine::solve_once(Complex z, const Matrix* init) const {
    if (z.imag() <= 0.0) throw ValidationError("solve requires Im(z) > 0");
    PointResult sol;
    try {
        sol = newton(z, init ? *init : warmup(z));
    } catch (const SolveError&) {
        // A wrong or stale mask shows up as a stuck residual; retry once
        // unrestricted before giving up.
        if (mask_.classes.size() == static_cast<std::size_t>(eq_->dim()) *
                                        static_cast<std::size_t>(eq_->dim()))
            throw;
        FixedPointEngine full(eq_, PatternMask::trivial(eq_->dim()), opts_, nu_);
        sol = full.newton(z, init ? *init : warmup(z));
    }
    for (int i = 0; i < eq_->dim(); ++i)
        if (!(sol.G(i, i).imag() < 0.0))
            throw SolveError(SolveError::Kind::PositivityViolation,
                             "diagonal entry " + std::to_string(i + 1) +
                                 " lost the Herglotz sign at z = (" + std::to_string(z.real()) +
                                 ", " + std::to_string(z.imag()) + ")");
    return sol;
}

PointResult FixedPointEngine::descend(double x, double im_target, double step_factor) const {
    double im = std::max(descent_top(), im_target * 1048576.0);  // eps * 2^20 floor
    Matrix seed;
    bool have_seed = false;
    while (true) {
        const Complex z(x, im);
        PointResult sol = solve_once(z, have_seed ? &seed : nullptr);
        seed = sol.G;
        have_seed = true;
        if (im <= im_target) return sol;
        im = std::max(im / step_factor, im_target);
    }
}

PointResult FixedPointEngine::solve_robust(Complex z, const Matrix* init) const {
    try {
        return solve_once(z, init);
    } catch (const SolveError&) {
    }
    // Wrong root (or a poisoned seed): approach the point from far above,
    // then retry with progressively finer descent steps.
    for (const double factor : {2.0, std::sqrt(2.0), std::pow(2.0, 0.25)}) {
        try {
            return descend(z.real(), z.imag(), factor);
        } catch (const SolveError&) {
        }
    }
    return descend(z.real(), z.imag(), std::pow(2.0, 0.125));  // last try; may throw
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

namespace {

GridSolveResult sweep_grid(const detail::FixedPointEngine& engine,
                           const std::vector<double>& xs, double epsilon, int threads) {
    const int n = static_cast<int>(xs.size());
    GridSolveResult out;
    if (n == 0) return out;

    const int chunks = std::max(1, std::min(threads, n));
    std::vector<GridSolveResult> partial(chunks);

    parallel_for(chunks, chunks, [&](int c) {
        const int lo = static_cast<int>(static_cast<std::int64_t>(n) * c / chunks);
        const int hi = static_cast<int>(static_cast<std::int64_t>(n) * (c + 1) / chunks);
        GridSolveResult& res = partial[c];
        Matrix seed;
        bool have_seed = false;
        for (int t = lo; t < hi; ++t) {
            const Complex z(xs[t], epsilon);
            try {
                PointResult sol;
                if (!have_seed) {
                    sol = engine.descend(xs[t], epsilon, 2.0);
                } else {
                    sol = engine.solve_robust(z, &seed);
                }
                seed = sol.G;
                have_seed = true;
                res.points.push_back(GSolution{sol.z, std::move(sol.G), sol.residual,
                                               sol.iterations});
            } catch (const SolveError& e) {
                res.failures.push_back(GridFailure{z, e.what()});
            } catch (const ValidationError& e) {
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

}  // namespace

GSolution solve_point(const ModelSpec& spec, Complex z, const Matrix* init,
                      const SolverOptions& opts) {
    const EtaMap eta = eta_for(spec);
    const SemicircularEquation eq(&eta);
    detail::FixedPointEngine engine(&eq, detect_pattern(eta), opts, eta.norm_bound());
    PointResult sol = engine.solve_robust(z, init);
    return GSolution{sol.z, std::move(sol.G), sol.residual, sol.iterations};
}

GridSolveResult solve_grid(const ModelSpec& spec, const std::vector<double>& xs,
                           double epsilon, const SolverOptions& opts) {
    if (epsilon <= 0.0) throw ValidationError("epsilon must be positive");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw ValidationError("x grid must be sorted");
    const EtaMap eta = eta_for(spec);
    const SemicircularEquation eq(&eta);
    detail::FixedPointEngine engine(&eq, detect_pattern(eta), opts, eta.norm_bound());
    return sweep_grid(engine, xs, epsilon, opts.threads);
}

Complex trace_G(const GSolution& sol, const DimensionProfile& dims) {
    const int d = static_cast<int>(sol.G.rows());
    if (dims.dim() != d) throw ValidationError("trace_G: dimension mismatch");
    Complex acc(0.0, 0.0);
    for (int i = 0; i < d; ++i) acc += dims.alpha_value(i) * sol.G(i, i);
    return acc;
}

}  // namespace blockspec
