#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "blockspec/model.hpp"

namespace blockspec {

/// Sampled density h_eps(x) = -Im G(x + i eps) / pi on a real grid, plus an
/// optional point mass at zero (Wishart bookkeeping). `mass` is the
/// trapezoid integral plus the atom; callers assert it is ~1 when the grid
/// covers the support bracket and the law has no escaping singularity.
struct DensityCurve {
    std::vector<double> xs;
    std::vector<double> values;
    double epsilon = 0.0;
    double atom0 = 0.0;
    double mass = 0.0;

    bool mass_ok(double tol = 5e-3) const { return std::abs(mass - 1.0) <= tol; }
};

struct SpectralMoments {
    std::vector<int> orders;
    std::vector<double> values;

    double order(int k) const;
};

/// Stieltjes inversion of solved transform samples. Values below -1e-9
/// raise (the solver should never produce them); the remaining negative
/// noise floor is clipped to zero.
DensityCurve stieltjes_invert(const std::vector<std::pair<double, Complex>>& cauchy,
                              double epsilon, double atom0 = 0.0);

/// Second-order Richardson extrapolation of h_eps to eps -> 0 from curves at
/// eps, 2 eps and 4 eps on one common grid.
DensityCurve richardson_extrapolate(const DensityCurve& h1, const DensityCurve& h2,
                                    const DensityCurve& h4);

/// Conservative support bracket from the eta norm bound nu (already 1.01
/// padded): [-R, R] with R = 2 max(nu, sqrt(nu)); Wishart mode returns
/// [0, R^2]. The sqrt lift covers nu < 1, where the m/2 nested eta factors
/// bound the edge by 2 sqrt(nu) rather than 2 nu.
std::pair<double, double> support_bracket(double eta_norm_bound, bool wishart);
std::pair<double, double> support_bracket(const CovarianceTensor& cov,
                                          const DimensionProfile* dims, bool wishart);

SpectralMoments curve_moments(const DensityCurve& curve, int max_k);

void write_density_csv(std::ostream& os, const DensityCurve& curve);
DensityCurve read_density_csv(std::istream& is);

/// Integral of the curve's piecewise-linear interpolant over [a, b].
double integrate_curve(const DensityCurve& curve, double a, double b);

}  // namespace blockspec
