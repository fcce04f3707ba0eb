#include <doctest.h>

#include <cmath>
#include <random>

#include "blockspec/oracle.hpp"
#include "blockspec/presets.hpp"
#include "support/oracles.hpp"

using namespace blockspec;

namespace {

Pairing make_pairing(std::initializer_list<std::pair<int, int>> blocks_1based) {
    int m = 0;
    for (auto [a, b] : blocks_1based) m = std::max({m, a, b});
    Pairing pi;
    pi.m = m;
    pi.partner.assign(m, -1);
    for (auto [a, b] : blocks_1based) {
        pi.partner[a - 1] = b - 1;
        pi.partner[b - 1] = a - 1;
    }
    return pi;
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("pairing counts") {
    CHECK(enumerate_pairings(2, false).size() == 1);
    CHECK(enumerate_pairings(2, true).size() == 1);
    CHECK(enumerate_pairings(6, false).size() == 15);
    CHECK(enumerate_pairings(6, true).size() == 5);
    CHECK(enumerate_pairings(8, false).size() == 105);  // 7!!
    CHECK(enumerate_pairings(8, true).size() == 14);    // Catalan C4
    CHECK(enumerate_pairings(5, false).empty());        // odd
    CHECK(enumerate_pairings(5, true).empty());
}

TEST_CASE("exponent bound: zero exactly on non-crossing pairings") {
    for (int m = 2; m <= 10; m += 2) {
        for (const auto& pi : enumerate_pairings(m, false)) {
            const auto gw = genus_weight(pi);
            CHECK(gw.exponent <= 0);
            CHECK((gw.exponent == 0) == is_noncrossing(pi));
        }
    }
}

TEST_CASE("kappa of the worked six-element pairing") {
    // {(1,4),(2,3),(5,6)} corresponds to eta(eta(I)) * eta(I)
    auto spec = *preset("toeplitz3").model;
    EtaMap eta = eta_for(spec);
    const Matrix I = Matrix::Identity(3, 3);
    const Matrix want = eta.apply(eta.apply(I)) * eta.apply(I);
    const Matrix got = kappa_pi(eta, make_pairing({{1, 4}, {2, 3}, {5, 6}}));
    CHECK(max_abs(got - want) < 1e-14);
}

TEST_CASE("kappa of a single block is eta(I)") {
    auto spec = *preset("toeplitz3").model;
    EtaMap eta = eta_for(spec);
    const Matrix got = kappa_pi(eta, make_pairing({{1, 2}}));
    CHECK(max_abs(got - eta.apply(Matrix::Identity(3, 3))) < 1e-15);
}

TEST_CASE("kappa is 1 for every NC pairing at d = 1") {
    EtaMap eta = eta_for(testing::scalar_model());
    for (int m = 2; m <= 8; m += 2)
        for (const auto& pi : enumerate_pairings(m, true))
            CHECK(std::abs(kappa_pi(eta, pi)(0, 0) - Complex(1.0, 0.0)) < 1e-14);
}

TEST_CASE("kappa rejects crossing pairings") {
    EtaMap eta = eta_for(testing::scalar_model());
    CHECK_THROWS_AS(kappa_pi(eta, make_pairing({{1, 3}, {2, 4}})), ValidationError);
}

TEST_CASE("kappa does not depend on the removal order") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto spec = testing::random_model(rng, 4);
        EtaMap eta = eta_for(spec);
        for (int m : {4, 6, 8}) {
            for (const auto& pi : enumerate_pairings(m, true)) {
                const Matrix a = kappa_pi(eta, pi, RemovalOrder::FirstBlock);
                const Matrix b = kappa_pi(eta, pi, RemovalOrder::LeftmostAdjacent);
                const Matrix c = kappa_pi(eta, pi, RemovalOrder::RightmostAdjacent);
                CHECK(max_abs(a - b) < 1e-14);
                CHECK(max_abs(a - c) < 1e-14);
            }
        }
    }
}

TEST_CASE("limiting moments by enumeration") {
    EtaMap scalar = eta_for(testing::scalar_model());
    CHECK(limiting_moment(scalar, 6) == doctest::Approx(5.0));
    CHECK(limiting_moment(scalar, 3) == 0.0);

    auto toeplitz = *preset("toeplitz3").model;
    CHECK(limiting_moment(toeplitz, 2) == doctest::Approx(1.0));
}

TEST_CASE("catalan numbers exactly up to m = 16") {
    EtaMap scalar = eta_for(testing::scalar_model());
    for (int k = 1; k <= 8; ++k)
        CHECK(limiting_moment(scalar, 2 * k) == testing::catalan(k));
}

TEST_CASE("recurrence route") {
    EtaMap scalar = eta_for(testing::scalar_model());
    auto mats = limiting_moment_recursive(scalar, 16);
    CHECK(max_abs(mats[0] - Matrix::Identity(1, 1)) == 0.0);
    for (int k = 1; k <= 8; ++k)
        CHECK(mats[2 * k](0, 0).real() == testing::catalan(k));

    auto toeplitz = *preset("toeplitz3").model;
    EtaMap eta = eta_for(toeplitz);
    auto tmats = limiting_moment_recursive(eta, 12);
    for (int m = 0; m <= 12; ++m) {
        if (m <= 12 && m % 2 == 0)
            CHECK(eta.trace(tmats[m]).real() ==
                  doctest::Approx(limiting_moment(eta, m)).epsilon(1e-12));
    }
}

TEST_CASE("finite-n genus expansion at d = 1") {
    auto scalar = testing::scalar_model();
    CHECK(finite_n_moment(scalar, 2, 7) == doctest::Approx(1.0));
    CHECK(finite_n_moment(scalar, 4, 10) == doctest::Approx(2.01));
    CHECK(finite_n_moment(scalar, 6, 10) == doctest::Approx(5.10));
}

TEST_CASE("finite-n approaches the limit at rate n^-2") {
    auto toeplitz = *preset("toeplitz3").model;
    const double limit = limiting_moment(*preset("toeplitz3").model, 6);
    std::vector<double> ns{20, 40, 80, 160};
    std::vector<double> gaps;
    for (double n : ns)
        gaps.push_back(std::abs(finite_n_moment(toeplitz, 6, static_cast<std::int64_t>(n)) -
                                limit));
    // least-squares slope of log gap vs log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t t = 0; t < ns.size(); ++t) {
        const double x = std::log(ns[t]), y = std::log(gaps[t]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double n = static_cast<double>(ns.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope + 2.0) < 0.1);
}

TEST_CASE("series extraction agrees with the combinatorial moments") {
    auto scalar = testing::scalar_model();
    auto mom = moments_from_cauchy_series(scalar, 8);
    for (int k = 0; k <= 4; ++k)
        CHECK(std::abs(mom[2 * k] - testing::catalan(k)) < 1e-9);
    CHECK(std::abs(mom[1]) < 1e-12);
    CHECK(std::abs(mom[3]) < 1e-12);

    auto toeplitz = *preset("toeplitz3").model;
    EtaMap eta = eta_for(toeplitz);
    auto tm = moments_from_cauchy_series(toeplitz, 8);
    for (int m = 0; m <= 8; m += 2) {
        const double want = limiting_moment(eta, m);
        CHECK(std::abs(tm[m] - want) <= 1e-6 * std::max(1.0, std::abs(want)));
    }
}

TEST_SUITE_END();
