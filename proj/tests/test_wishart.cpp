#include <doctest.h>

#include <cmath>

#include "blockspec/density.hpp"
#include "blockspec/eta.hpp"
#include "blockspec/presets.hpp"
#include "blockspec/wishart.hpp"
#include "support/oracles.hpp"

using namespace blockspec;

TEST_SUITE_BEGIN("wishart");

TEST_CASE("marchenko-pastur at lambda = 1 matches the closed form") {
    auto w = *preset("mp:1").wishart;
    auto sol = solve_wishart_point(w, Complex(5.0, 1e-6));
    CHECK(std::abs(recover_GHH(sol) - testing::mp_G(1.0, Complex(5.0, 1e-6))) < 1e-9);
}

TEST_CASE("far field: z H ~ I") {
    auto w = *preset("mimo:4,4,1").wishart;
    const Complex z(0.0, 1e6);
    auto sol = solve_wishart_point(w, z);
    CHECK(max_abs(z * sol.H_matrix - Matrix::Identity(11, 11)) < 1e-5);
}

TEST_CASE("banded channel solution satisfies the six coupled equations") {
    auto w = *preset("mimo:4,4,1").wishart;
    for (double x : {0.2, 0.6, 1.1}) {
        const Complex z(x, 1e-6);
        auto sol = solve_wishart_point(w, z);
        const Matrix& H = sol.H_matrix;
        const Complex f1 = H(0, 0), f2 = H(1, 1);
        const Complex g1 = H(4, 4), g2 = H(5, 5), g3 = H(6, 6), g4 = H(7, 7);
        CHECK(std::abs(z * f1 - 1.0 - z * f1 * (g1 + g2 + g3 + g4) / 11.0) <= 1e-10);
        CHECK(std::abs(z * f2 - 1.0 - z * f2 * (g2 + 2.0 * g3 + g4) / 11.0) <= 1e-10);
        CHECK(std::abs(z * g1 - 1.0 - z * f1 * g1 / 11.0) <= 1e-10);
        CHECK(std::abs(z * g2 - 1.0 - z * (f1 + f2) * g2 / 11.0) <= 1e-10);
        CHECK(std::abs(z * g3 - 1.0 - z * (f1 + 2.0 * f2) * g3 / 11.0) <= 1e-10);
        CHECK(std::abs(z * g4 - 1.0 - 2.0 * z * (f1 + f2) * g4 / 11.0) <= 1e-10);
        // f_j = f_{K+1-j}, g_j = g_{K+L-j}
        CHECK(std::abs(H(0, 0) - H(3, 3)) <= 1e-10);
        CHECK(std::abs(H(1, 1) - H(2, 2)) <= 1e-10);
        CHECK(std::abs(H(4, 4) - H(10, 10)) <= 1e-10);
        CHECK(std::abs(H(5, 5) - H(9, 9)) <= 1e-10);
        CHECK(std::abs(H(6, 6) - H(8, 8)) <= 1e-10);
        // off-diagonal corners vanish for non-selfadjoint blocks
        CHECK(sol.offdiag_norm <= 1e-10);
        // Herglotz sign on every diagonal entry
        for (int i = 0; i < 11; ++i) CHECK(H(i, i).imag() < 0.0);
    }
}

TEST_CASE("recovery coefficients") {
    auto even = *preset("mp:1").wishart;  // M = N
    auto sol = solve_wishart_point(even, Complex(3.0, 1e-3));
    CHECK(sol.theta == doctest::Approx(1.0));
    CHECK(sol.theta0 == doctest::Approx(0.0));

    auto twice = *preset("mp:2").wishart;  // N = 2M
    auto sol2 = solve_wishart_point(twice, Complex(3.0, 1e-3));
    CHECK(sol2.theta == doctest::Approx(1.5));
    CHECK(sol2.theta0 == doctest::Approx(0.5));
}

TEST_CASE("both recovery routes agree where both apply") {
    for (const char* name : {"mp:1", "mp:2", "mimo:4,4,1"}) {
        auto w = *preset(name).wishart;
        for (double x : {0.4, 1.3, 3.1}) {
            auto sol = solve_wishart_point(w, Complex(x, 1e-6));
            REQUIRE(sol.offdiag_norm <= 1e-10);
            CHECK(std::abs(recover_GHH(sol) - recover_GHH_pole_route(sol)) <= 1e-9);
        }
    }
}

TEST_CASE("reduced path reproduces the Gram transform") {
    auto w = *preset("mp:1").wishart;
    for (double x : {0.7, 2.5, 5.0}) {
        const Complex z(x, 1e-6);
        const Matrix g1 = solve_reduced_G1(w, z);
        CHECK(std::abs(g1(0, 0) - testing::mp_G(1.0, z)) < 1e-8);
    }
    // far field
    const Complex far(0.0, 1e6);
    CHECK(std::abs(solve_reduced_G1(w, far)(0, 0) - 1.0 / far) < 1e-9);
}

TEST_CASE("reduced path agrees with the full embedding at d = 11") {
    auto w = *preset("mimo:4,4,1").wishart;
    for (double x : {0.3, 0.9}) {
        const Complex z(x, 1e-6);
        auto full = solve_wishart_point(w, z);
        const Matrix g1 = solve_reduced_G1(w, z);
        CHECK(max_abs(g1 - full.G1) <= 1e-8);
        // tr_r G1 = (f1 + f2) / 2
        const Complex want = (full.H_matrix(0, 0) + full.H_matrix(1, 1)) / 2.0;
        CHECK(std::abs(recover_GHH(full) - want) < 1e-12);
    }
}

TEST_CASE("reduced path rejects unsupported grids") {
    auto rect = *preset("mimo-rect:2,2,2").wishart;  // 2N x N blocks
    CHECK_THROWS_AS(solve_reduced_G1(rect, Complex(1.0, 0.1)), ValidationError);
}

TEST_CASE("recovery routes agree for unequal row blocks") {
    // two row blocks of different sizes sharing no names: the top-block
    // trace must be row-size weighted to match the pole-subtraction route
    std::vector<BlockName> names{BlockName{"A", false, {}, 0.0},
                                 BlockName{"B", false, {}, 0.0}};
    std::vector<std::optional<BlockRef>> h(2 * 2);
    h[0] = BlockRef{0, false, 1.0};
    h[3] = BlockRef{1, false, 0.5};
    WishartSpec w(2, 2, names, h, {2, 1}, {2, 3});
    for (double x : {0.15, 0.6, 1.5}) {
        auto sol = solve_wishart_point(w, Complex(x, 1e-6));
        REQUIRE(sol.offdiag_norm <= 1e-10);
        CHECK(std::abs(recover_GHH(sol) - recover_GHH_pole_route(sol)) <= 1e-9);
    }
}

TEST_CASE("wide sweep out to x = 25 stays converged") {
    auto w = *preset("mimo:4,4,1").wishart;
    std::vector<double> xs;
    for (double x = 0.01; x <= 25.0 + 1e-9; x += 0.1) xs.push_back(x);
    auto grid = solve_wishart_grid(w, xs, 1e-6);
    CHECK(grid.failures.empty());
    for (const auto& p : grid.points) {
        CHECK(p.residual <= 1e-9);
        const Complex z = p.z, f1 = p.H_matrix(0, 0);
        const Complex g1 = p.H_matrix(4, 4), g2 = p.H_matrix(5, 5);
        const Complex g3 = p.H_matrix(6, 6), g4 = p.H_matrix(7, 7);
        CHECK(std::abs(z * f1 - 1.0 - z * f1 * (g1 + g2 + g3 + g4) / 11.0) <= 1e-10);
    }
}

TEST_CASE("selfadjoint blocks go through the full embedding") {
    // H = A Hermitian: HH* = A^2, and A is semicircular with second moment
    // 1/2 here, so G recovers g(sqrt z)/sqrt z of that semicircle.
    std::vector<BlockName> names{BlockName{"A", true, {}, 0.0}};
    std::vector<std::optional<BlockRef>> h{BlockRef{0, false, 1.0}};
    WishartSpec w(1, 1, names, h, {1}, {1});
    CHECK_FALSE(w.all_nonselfadjoint());
    CHECK_THROWS_AS(solve_reduced_G1(w, Complex(1.0, 0.1)), ValidationError);

    for (double x : {0.6, 1.4}) {
        const Complex z(x, 1e-6);
        auto sol = solve_wishart_point(w, z);
        const Complex sq = std::sqrt(z);  // upper half plane branch
        const double s2 = 0.5;            // block variance N/n
        const Complex g_sc = (sq - std::sqrt(sq - 2.0 * std::sqrt(s2)) *
                                       std::sqrt(sq + 2.0 * std::sqrt(s2))) /
                             (2.0 * s2);
        CHECK(std::abs(recover_GHH_pole_route(sol) - g_sc / sq) < 1e-8);
    }
}

TEST_CASE("gram mass accounts for the spurious zeros") {
    // tr_alpha H alone carries an atom of weight (N - M)/(M + N) at zero;
    // the recovered transform must integrate to one on its own.
    auto w = *preset("mp:2").wishart;
    auto emb = build_wishart_embedding(w);
    const auto bracket = support_bracket(eta_for(emb).norm_bound(), true);
    const int points = 4000;
    std::vector<double> xs(points);
    for (int t = 0; t < points; ++t)
        xs[t] = bracket.second * static_cast<double>(t) / (points - 1.0);
    auto grid = solve_wishart_grid(w, xs, 1e-6);
    REQUIRE(grid.failures.empty());
    std::vector<std::pair<double, Complex>> samples;
    for (const auto& p : grid.points)
        samples.emplace_back(p.z.real(), recover_GHH(p));
    auto curve = stieltjes_invert(samples, 1e-6);
    CHECK(std::abs(curve.mass - 1.0) <= 1e-3);
    // and the curve tracks the closed-form density
    for (std::size_t t = 0; t < curve.xs.size(); t += 500)
        CHECK(std::abs(curve.values[t] - testing::mp_density(2.0, curve.xs[t])) < 5e-3);
}

TEST_SUITE_END();
