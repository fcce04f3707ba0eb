#pragma once

#include <string>
#include <vector>

#include "blockspec/fixed_point.hpp"
#include "blockspec/model.hpp"

namespace blockspec {

/// The matrix-valued Cauchy transform at one point of the upper half plane.
struct GSolution {
    Complex z;
    Matrix G;
    double residual = 0.0;
    int iterations = 0;
};

struct GridFailure {
    Complex z;
    std::string reason;
};

struct GridSolveResult {
    std::vector<GSolution> points;  // ordered along the continuation path
    std::vector<GridFailure> failures;
};

GSolution solve_point(const ModelSpec& spec, Complex z, const Matrix* init = nullptr,
                      const SolverOptions& opts = {});

/// Left-to-right sweep at z = x + i eps, each point seeded by its
/// predecessor; the first point of each chunk is reached by vertical
/// descent. Failures are recorded, the sweep continues.
GridSolveResult solve_grid(const ModelSpec& spec, const std::vector<double>& xs,
                           double epsilon, const SolverOptions& opts = {});

/// tr_d or tr_alpha of the solution, per the dimension profile.
Complex trace_G(const GSolution& sol, const DimensionProfile& dims);

}  // namespace blockspec
