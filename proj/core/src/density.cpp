#include "blockspec/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "blockspec/eta.hpp"

namespace blockspec {

namespace {
constexpr double kPi = 3.14159265358979323846;

double trapezoid_mass(const std::vector<double>& xs, const std::vector<double>& vs) {
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < xs.size(); ++t)
        acc += 0.5 * (vs[t] + vs[t + 1]) * (xs[t + 1] - xs[t]);
    return acc;
}
}  // namespace

double SpectralMoments::order(int k) const {
    for (std::size_t t = 0; t < orders.size(); ++t)
        if (orders[t] == k) return values[t];
    throw ValidationError("moment order " + std::to_string(k) + " not computed");
}

DensityCurve stieltjes_invert(const std::vector<std::pair<double, Complex>>& cauchy,
                              double epsilon, double atom0) {
    DensityCurve curve;
    curve.epsilon = epsilon;
    curve.atom0 = atom0;
    curve.xs.reserve(cauchy.size());
    curve.values.reserve(cauchy.size());
    for (const auto& [x, g] : cauchy) {
        const double v = -g.imag() / kPi;
        if (v < -1e-9)
            throw SolveError(SolveError::Kind::PositivityViolation,
                             "negative density " + std::to_string(v) + " at x = " +
                                 std::to_string(x));
        curve.xs.push_back(x);
        curve.values.push_back(std::max(v, 0.0));
    }
    curve.mass = trapezoid_mass(curve.xs, curve.values) + curve.atom0;
    return curve;
}

DensityCurve richardson_extrapolate(const DensityCurve& h1, const DensityCurve& h2,
                                    const DensityCurve& h4) {
    if (h1.xs != h2.xs || h1.xs != h4.xs)
        throw ValidationError("Richardson extrapolation needs one common grid");
    DensityCurve out = h1;
    // h(eps) = h0 + a eps + b eps^2 through eps, 2 eps, 4 eps.
    for (std::size_t t = 0; t < out.values.size(); ++t) {
        const double v = (8.0 * h1.values[t] - 6.0 * h2.values[t] + h4.values[t]) / 3.0;
        out.values[t] = std::max(v, 0.0);
    }
    out.mass = trapezoid_mass(out.xs, out.values) + out.atom0;
    return out;
}

std::pair<double, double> support_bracket(double eta_norm_bound, bool wishart) {
    const double nu = eta_norm_bound;
    const double radius = 2.0 * std::max(nu, std::sqrt(nu));
    if (wishart) return {0.0, radius * radius};
    return {-radius, radius};
}

std::pair<double, double> support_bracket(const CovarianceTensor& cov,
                                          const DimensionProfile* dims, bool wishart) {
    return support_bracket(eta_norm(cov, dims), wishart);
}

SpectralMoments curve_moments(const DensityCurve& curve, int max_k) {
    SpectralMoments out;
    for (int k = 0; k <= max_k; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + 1 < curve.xs.size(); ++t) {
            const double xl = curve.xs[t], xr = curve.xs[t + 1];
            const double fl = curve.values[t] * std::pow(xl, k);
            const double fr = curve.values[t + 1] * std::pow(xr, k);
            acc += 0.5 * (fl + fr) * (xr - xl);
        }
        if (k == 0) acc += curve.atom0;  // the atom sits at x = 0
        out.orders.push_back(k);
        out.values.push_back(acc);
    }
    return out;
}

void write_density_csv(std::ostream& os, const DensityCurve& curve) {
    os << "x,density\n";
    char buf[80];
    for (std::size_t t = 0; t < curve.xs.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.xs[t], curve.values[t]);
        os << buf;
    }
}

DensityCurve read_density_csv(std::istream& is) {
    DensityCurve curve;
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,density", 0) != 0)
        throw ValidationError("density CSV must start with an 'x,density' header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("malformed density CSV line: " + line);
        curve.xs.push_back(std::stod(line.substr(0, comma)));
        curve.values.push_back(std::stod(line.substr(comma + 1)));
    }
    curve.mass = trapezoid_mass(curve.xs, curve.values);
    return curve;
}

double integrate_curve(const DensityCurve& curve, double a, double b) {
    if (curve.xs.size() < 2 || b <= a) return 0.0;
    auto value_at = [&](double x) {
        if (x < curve.xs.front() || x > curve.xs.back()) return 0.0;
        if (x == curve.xs.front()) return curve.values.front();
        if (x == curve.xs.back()) return curve.values.back();
        const auto it = std::upper_bound(curve.xs.begin(), curve.xs.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - curve.xs.begin());
        const std::size_t lo = hi - 1;
        const double t = (x - curve.xs[lo]) / (curve.xs[hi] - curve.xs[lo]);
        return (1.0 - t) * curve.values[lo] + t * curve.values[hi];
    };
    // Integrate the interpolant exactly: break at interior grid points.
    double acc = 0.0;
    double left = a;
    const auto begin = std::upper_bound(curve.xs.begin(), curve.xs.end(), a);
    for (auto it = begin; it != curve.xs.end() && *it < b; ++it) {
        acc += 0.5 * (value_at(left) + value_at(*it)) * (*it - left);
        left = *it;
    }
    acc += 0.5 * (value_at(left) + value_at(b)) * (b - left);
    return acc;
}

}  // namespace blockspec
