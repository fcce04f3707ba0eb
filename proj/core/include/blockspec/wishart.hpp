#pragma once

#include <vector>

#include "blockspec/model.hpp"
#include "blockspec/solver.hpp"

namespace blockspec {

/// H(z) of the squared variable: z H = I + z eta(H) H on the (r+s)-block
/// embedding, together with the recovery coefficients
/// theta = 1 / (2 sum_{j<=r} alpha_j) and
/// theta0 = (sum_{j>r} alpha_j - sum_{j<=r} alpha_j) / (2 sum_{j<=r} alpha_j).
struct WishartSolution {
    Complex z;
    Matrix H_matrix;  // (r+s) x (r+s)
    Matrix G1;        // r x r upper-left block
    Matrix G2;        // s x s lower-right block
    std::vector<double> alpha;  // embedding profile, rows then columns
    double theta = 0.0;
    double theta0 = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double offdiag_norm = 0.0;  // max |G3| entry; ~0 for non-selfadjoint blocks
    int r = 0, s = 0;
};

struct WishartGridResult {
    std::vector<WishartSolution> points;
    std::vector<GridFailure> failures;
};

WishartSolution solve_wishart_point(const WishartSpec& w, Complex z,
                                    const SolverOptions& opts = {});

WishartGridResult solve_wishart_grid(const WishartSpec& w, const std::vector<double>& xs,
                                     double epsilon, const SolverOptions& opts = {});

/// G_{HH*}(z). With a vanishing off-diagonal block this is tr_r(G1); the
/// pole subtraction route theta tr_alpha H - theta0 / z is kept alongside
/// and the two must agree.
Complex recover_GHH(const WishartSolution& sol);

/// The pole-subtraction recovery on its own (for route-agreement checks).
Complex recover_GHH_pole_route(const WishartSolution& sol);

/// The eliminated equation z G1 = I_r + eta2((I_s - eta1(G1))^-1) G1, solved
/// directly on the r x r block. Requires all blocks non-selfadjoint and of
/// one common square size.
Matrix solve_reduced_G1(const WishartSpec& w, Complex z, const SolverOptions& opts = {});

}  // namespace blockspec
