#pragma once

#include <memory>
#include <string>
#include <vector>

#include "blockspec/eta.hpp"
#include "blockspec/types.hpp"

namespace blockspec {

/// One holomorphic matrix equation F(G, z) = 0 solved by the shared
/// Newton/continuation engine. Implementations: the semicircular equation,
/// its Wishart z-squared variant, and the eliminated G1 equation.
class Equation {
public:
    virtual ~Equation() = default;
    virtual int dim() const = 0;
    virtual Matrix F(const Matrix& G, Complex z) const = 0;
    /// Directional derivative dF(G)[E] at fixed z.
    virtual Matrix dF(const Matrix& G, const Matrix& E, Complex z) const = 0;
    /// One step of the contraction used for warm-up seeding.
    virtual Matrix fp_step(const Matrix& G, Complex z) const = 0;
};

/// z G = I + eta(G) G, as F(G) = eta(G) G - z G + I.
class SemicircularEquation final : public Equation {
public:
    explicit SemicircularEquation(const EtaMap* eta) : eta_(eta) {}
    int dim() const override { return eta_->dim(); }
    Matrix F(const Matrix& G, Complex z) const override;
    Matrix dF(const Matrix& G, const Matrix& E, Complex z) const override;
    Matrix fp_step(const Matrix& G, Complex z) const override;

private:
    const EtaMap* eta_;
};

/// z H = I + z eta(H) H in the squared variable, as
/// F(H) = z eta(H) H - z H + I.
class WishartEquation final : public Equation {
public:
    explicit WishartEquation(const EtaMap* eta) : eta_(eta) {}
    int dim() const override { return eta_->dim(); }
    Matrix F(const Matrix& G, Complex z) const override;
    Matrix dF(const Matrix& G, const Matrix& E, Complex z) const override;
    Matrix fp_step(const Matrix& G, Complex z) const override;

private:
    const EtaMap* eta_;
};

struct SolverOptions {
    double newton_tol = 1e-12;  // stop when max-norm residual reaches this
    double step_tol = 1e-13;    // or the Newton step shrinks to this
    int max_newton = 200;
    int warmup_iterations = 50;
    double accept_residual = 1e-9;  // hard invariant on returned solutions
    int threads = 1;
};

struct PointResult {
    Complex z;
    Matrix G;
    double residual = 0.0;
    int iterations = 0;
};

namespace detail {

/// Newton on the pattern's equality classes plus homotopy continuation.
/// Wrong-root detection: every diagonal entry of the solution must have a
/// negative imaginary part (each is a Cauchy transform); violations trigger
/// re-descent from deeper in the half plane.
class FixedPointEngine {
public:
    FixedPointEngine(const Equation* eq, PatternMask mask, SolverOptions opts,
                     double eta_norm_bound);

    /// Newton at one point (no retries). Throws SolveError.
    PointResult solve_once(Complex z, const Matrix* init) const;

    /// Newton with warm-up seeding and positivity-triggered re-descent.
    PointResult solve_robust(Complex z, const Matrix* init) const;

    /// Vertical descent x + i eps 2^k down to x + i eps, geometric with the
    /// given step factor; returns the solution at the bottom.
    PointResult descend(double x, double im_target, double step_factor) const;

    double descent_top() const;
    const PatternMask& mask() const { return mask_; }

private:
    Matrix warmup(Complex z) const;
    PointResult newton(Complex z, Matrix G) const;

    const Equation* eq_;
    PatternMask mask_;
    SolverOptions opts_;
    double nu_;
};

}  // namespace detail

}  // namespace blockspec
