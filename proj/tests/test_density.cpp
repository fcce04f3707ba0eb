#include <doctest.h>

#include <cmath>
#include <sstream>

#include "blockspec/density.hpp"
#include "blockspec/eta.hpp"
#include "blockspec/presets.hpp"
#include "blockspec/solver.hpp"
#include "support/oracles.hpp"

using namespace blockspec;

namespace {

DensityCurve semicircle_curve(int points, double eps) {
    auto spec = testing::scalar_model();
    const auto bracket = support_bracket(eta_for(spec).norm_bound(), false);
    std::vector<double> xs(points);
    for (int t = 0; t < points; ++t)
        xs[t] = bracket.first + (bracket.second - bracket.first) * t / (points - 1.0);
    auto grid = solve_grid(spec, xs, eps);
    REQUIRE(grid.failures.empty());
    std::vector<std::pair<double, Complex>> samples;
    for (const auto& p : grid.points)
        samples.emplace_back(p.z.real(), trace_G(p, spec.dims));
    return stieltjes_invert(samples, eps);
}

}  // namespace

TEST_SUITE_BEGIN("density");

TEST_CASE("stieltjes inversion of the semicircle") {
    auto curve = semicircle_curve(1201, 1e-6);
    // value at the center
    double at0 = 0.0;
    double best = 1e9;
    for (std::size_t t = 0; t < curve.xs.size(); ++t)
        if (std::abs(curve.xs[t]) < best) {
            best = std::abs(curve.xs[t]);
            at0 = curve.values[t];
        }
    CHECK(std::abs(at0 - 1.0 / 3.14159265358979323846) < 2e-3);
    CHECK(curve.mass_ok());
}

TEST_CASE("density vanishes outside the support") {
    auto spec = testing::scalar_model();
    auto sol = solve_point(spec, Complex(5.0, 1e-6));
    const double h = -trace_G(sol, spec.dims).imag() / 3.14159265358979323846;
    CHECK(std::abs(h) < 1e-4);
}

TEST_CASE("support brackets") {
    auto scalar = testing::scalar_model();
    auto b = support_bracket(eta_for(scalar).norm_bound(), false);
    CHECK(b.first == doctest::Approx(-2.02));
    CHECK(b.second == doctest::Approx(2.02));

    CovarianceTensor zero(2);
    auto bz = support_bracket(eta_norm(zero), false);
    CHECK(bz.first == 0.0);
    CHECK(bz.second == 0.0);

    // Gram-law bracket of the lambda = 1 embedding covers [0, 4]
    auto emb = build_wishart_embedding(*preset("mp:1").wishart);
    auto bw = support_bracket(eta_for(emb).norm_bound(), true);
    CHECK(bw.first == 0.0);
    CHECK(bw.second >= 4.0);
}

TEST_CASE("curve moments of the semicircle") {
    auto curve = semicircle_curve(1501, 1e-6);
    auto mom = curve_moments(curve, 6);
    CHECK(std::abs(mom.order(1)) < 1e-6);
    CHECK(std::abs(mom.order(2) - 1.0) < 1e-2);
    CHECK(std::abs(mom.order(4) - 2.0) < 1e-2);
    CHECK(std::abs(mom.order(6) - 5.0) < 1e-2);
}

TEST_CASE("re-integration against 1/(z-t) reproduces G(3i)") {
    auto curve = semicircle_curve(1501, 1e-6);
    const Complex z(0.0, 3.0);
    Complex acc(0.0, 0.0);
    for (std::size_t t = 0; t + 1 < curve.xs.size(); ++t) {
        const double xl = curve.xs[t], xr = curve.xs[t + 1];
        acc += 0.5 * (curve.values[t] / (z - xl) + curve.values[t + 1] / (z - xr)) * (xr - xl);
    }
    auto sol = solve_point(testing::scalar_model(), z);
    CHECK(std::abs(acc - trace_G(sol, testing::scalar_model().dims)) < 5e-3);
}

TEST_CASE("peak sharpens as epsilon decreases") {
    std::vector<double> peaks;
    for (double eps : {4e-6, 2e-6, 1e-6}) {
        auto curve = semicircle_curve(301, eps);
        peaks.push_back(*std::max_element(curve.values.begin(), curve.values.end()));
    }
    CHECK(peaks[0] <= peaks[1] + 1e-12);
    CHECK(peaks[1] <= peaks[2] + 1e-12);
}

TEST_CASE("mass outside the bracket is negligible") {
    auto spec = testing::scalar_model();
    const auto bracket = support_bracket(eta_for(spec).norm_bound(), false);
    std::vector<double> xs;
    for (double x = -4.0; x <= 4.0; x += 0.005) xs.push_back(x);
    auto grid = solve_grid(spec, xs, 1e-6);
    std::vector<std::pair<double, Complex>> samples;
    for (const auto& p : grid.points)
        samples.emplace_back(p.z.real(), trace_G(p, spec.dims));
    auto curve = stieltjes_invert(samples, 1e-6);
    double outside = 0.0;
    for (std::size_t t = 0; t + 1 < curve.xs.size(); ++t) {
        const double mid = 0.5 * (curve.xs[t] + curve.xs[t + 1]);
        if (mid < bracket.first || mid > bracket.second)
            outside += 0.5 * (curve.values[t] + curve.values[t + 1]) *
                       (curve.xs[t + 1] - curve.xs[t]);
    }
    CHECK(outside <= 1e-3);
}

TEST_CASE("negative densities beyond the noise floor are rejected") {
    std::vector<std::pair<double, Complex>> bad{{0.0, Complex(0.0, 1e-6)}};
    CHECK_THROWS_AS(stieltjes_invert(bad, 1e-6), SolveError);
    // noise-floor values are clipped
    std::vector<std::pair<double, Complex>> ok{{0.0, Complex(0.0, 1e-10)}};
    auto curve = stieltjes_invert(ok, 1e-6);
    CHECK(curve.values[0] == 0.0);
}

TEST_CASE("richardson extrapolation recovers a quadratic model exactly") {
    DensityCurve h1, h2, h4;
    h1.xs = h2.xs = h4.xs = {0.0, 1.0};
    auto value = [](double eps) { return 0.7 + 0.3 * eps + 0.1 * eps * eps; };
    h1.values = {value(1.0), value(1.0)};
    h2.values = {value(2.0), value(2.0)};
    h4.values = {value(4.0), value(4.0)};
    auto out = richardson_extrapolate(h1, h2, h4);
    CHECK(out.values[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("CSV round trip") {
    auto curve = semicircle_curve(101, 1e-6);
    std::ostringstream os;
    write_density_csv(os, curve);
    std::istringstream is(os.str());
    auto back = read_density_csv(is);
    REQUIRE(back.xs.size() == curve.xs.size());
    for (std::size_t t = 0; t < back.xs.size(); ++t) {
        CHECK(back.xs[t] == curve.xs[t]);  // 17 significant digits are exact
        CHECK(back.values[t] == curve.values[t]);
    }
    std::istringstream bad("wrong,header\n");
    CHECK_THROWS_AS(read_density_csv(bad), ValidationError);
}

TEST_SUITE_END();
