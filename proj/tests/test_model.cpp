#include <doctest.h>

#include "blockspec/model.hpp"
#include "blockspec/presets.hpp"
#include "support/oracles.hpp"

using namespace blockspec;

namespace {

// The two tridiagonal layouts contrasted when the covariance rule is
// introduced: selfadjoint A1 vs non-selfadjoint B1 at the same positions.
BlockGrid tridiagonal(bool selfadjoint) {
    std::vector<BlockName> names{BlockName{"X1", selfadjoint, {}, 0.0}};
    std::vector<std::optional<BlockRef>> e(9);
    e[0 * 3 + 1] = BlockRef{0, false, 1.0};
    e[1 * 3 + 0] = BlockRef{0, !selfadjoint, 1.0};
    e[1 * 3 + 2] = BlockRef{0, false, 1.0};
    e[2 * 3 + 1] = BlockRef{0, !selfadjoint, 1.0};
    return BlockGrid(3, std::move(names), std::move(e));
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("rational arithmetic is exact") {
    CHECK(Rational::parse("1/3") + Rational::parse("2/3") == Rational(1));
    CHECK(Rational::parse("0.5") == Rational(1, 2));
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK_THROWS_AS(Rational(1, 0), ValidationError);
}

TEST_CASE("dimension profile") {
    auto sq = DimensionProfile::square(3);
    CHECK(sq.alpha()[0] == Rational(1, 3));
    CHECK(sq.uniform());
    auto rect = DimensionProfile::rectangular({2, 1, 1});
    CHECK(rect.alpha()[0] == Rational(1, 2));
    CHECK(rect.block_sizes(10) == std::vector<int>{20, 10, 10});
    CHECK_FALSE(rect.uniform());
    CHECK_THROWS_AS(DimensionProfile::rectangular_alpha({Rational(1, 3), Rational(1, 3)}),
                    ValidationError);
}

TEST_CASE("selfadjoint tridiagonal couples all 16 combinations") {
    auto cov = derive_sigma(tridiagonal(true));
    const std::pair<int, int> pos[] = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
    int nonzero = 0;
    for (auto [i, j] : pos)
        for (auto [k, l] : pos) {
            CHECK(cov.sigma(i, j, k, l) == Complex(1.0, 0.0));
            ++nonzero;
        }
    CHECK(nonzero == 16);
    CHECK(cov.nonzeros().size() == 16);
}

TEST_CASE("non-selfadjoint tridiagonal couples only adjoint pairs") {
    auto cov = derive_sigma(tridiagonal(false));
    // 1-based: sigma(1,2;2,1), sigma(1,2;3,2), sigma(2,3;2,1), sigma(2,3;3,2)
    CHECK(cov.sigma(0, 1, 1, 0) == Complex(1.0, 0.0));
    CHECK(cov.sigma(0, 1, 2, 1) == Complex(1.0, 0.0));
    CHECK(cov.sigma(1, 2, 1, 0) == Complex(1.0, 0.0));
    CHECK(cov.sigma(1, 2, 2, 1) == Complex(1.0, 0.0));
    // and the adjoint values
    CHECK(cov.sigma(1, 0, 0, 1) == Complex(1.0, 0.0));
    CHECK(cov.sigma(2, 1, 0, 1) == Complex(1.0, 0.0));
    CHECK(cov.sigma(1, 0, 1, 2) == Complex(1.0, 0.0));
    CHECK(cov.sigma(2, 1, 1, 2) == Complex(1.0, 0.0));
    CHECK(cov.nonzeros().size() == 8);
    // same-flag pairs decouple
    CHECK(cov.sigma(0, 1, 0, 1) == Complex(0.0, 0.0));
    CHECK(cov.sigma(0, 1, 1, 2) == Complex(0.0, 0.0));
}

TEST_CASE("single selfadjoint block, d = 1") {
    auto spec = testing::scalar_model();
    CHECK(spec.cov.sigma(0, 0, 0, 0) == Complex(1.0, 0.0));
    CHECK(spec.cov.nonzeros().size() == 1);
}

TEST_CASE("validate_sigma flags symmetry breaks") {
    CovarianceTensor cov(2);
    cov.set(0, 1, 1, 0, Complex(1.0, 0.0));  // mirror (1,0;0,1) missing
    auto v = validate_sigma(cov, DimensionProfile::square(2));
    REQUIRE(v.size() == 1);
    CHECK(v[0].what.find("symmetry") != std::string::npos);
}

TEST_CASE("validate_sigma flags fitting breaks") {
    CovarianceTensor cov(2);
    cov.set(0, 0, 1, 1, Complex(1.0, 0.0));
    cov.set(1, 1, 0, 0, Complex(1.0, 0.0));
    auto dims = DimensionProfile::rectangular_alpha({Rational(1, 3), Rational(2, 3)});
    auto v = validate_sigma(cov, dims);
    REQUIRE_FALSE(v.empty());
    CHECK(v[0].what.find("fitting") != std::string::npos);
}

TEST_CASE("toeplitz covariance is clean") {
    auto spec = preset("toeplitz3");
    REQUIRE(spec.model.has_value());
    CHECK(validate_sigma(spec.model->cov, spec.model->dims).empty());
    CHECK(spec.model->dims.alpha()[0] == Rational(1, 3));
}

TEST_CASE("derived sigma always validates") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        auto spec = testing::random_model(rng);
        CHECK(validate_sigma(spec.cov, spec.dims).empty());
    }
}

TEST_CASE("grid self-adjointness violations name the entry") {
    std::vector<BlockName> names{BlockName{"B", false, {}, 0.0}};
    std::vector<std::optional<BlockRef>> e(4);
    e[0 * 2 + 1] = BlockRef{0, false, 1.0};
    e[1 * 2 + 0] = BlockRef{0, false, 1.0};  // should be the adjoint
    CHECK_THROWS_WITH_AS(BlockGrid(2, names, e),
                         doctest::Contains("(2,1)"), ValidationError);

    std::vector<std::optional<BlockRef>> diag(1);
    diag[0] = BlockRef{0, false, 1.0};  // non-selfadjoint name on the diagonal
    CHECK_THROWS_AS(BlockGrid(1, names, diag), ValidationError);
}

TEST_CASE("wishart embedding of a single block") {
    std::vector<BlockName> names{BlockName{"H", false, {}, 0.0}};
    std::vector<std::optional<BlockRef>> h{BlockRef{0, false, 1.0}};
    WishartSpec w(1, 1, names, h, {1}, {1});
    auto emb = build_wishart_embedding(w);
    CHECK(emb.cov.dim() == 2);
    CHECK(emb.dims.alpha()[0] == Rational(1, 2));
    CHECK(emb.cov.sigma(0, 1, 1, 0) == Complex(1.0, 0.0));
    CHECK(emb.cov.sigma(1, 0, 0, 1) == Complex(1.0, 0.0));
    CHECK(emb.cov.nonzeros().size() == 2);
}

TEST_CASE("K = L = 4 banded channel embeds at d = 11") {
    auto spec = preset("mimo:4,4,1");
    REQUIRE(spec.wishart.has_value());
    CHECK_FALSE(spec.wishart->swapped());
    auto emb = build_wishart_embedding(*spec.wishart);
    CHECK(emb.cov.dim() == 11);
    CHECK(emb.dims.alpha()[0] == Rational(1, 11));
    // H-quadrant entries never couple with H-quadrant entries.
    for (const auto& e : emb.cov.nonzeros()) {
        const bool first_in_H = e.i < 4 && e.j >= 4;
        const bool second_in_H = e.k < 4 && e.l >= 4;
        CHECK_FALSE((first_in_H && second_in_H));
    }
}

TEST_CASE("double-ratio grid embeds at d = 7 after normalization") {
    auto spec = preset("mimo:2,2,2");
    REQUIRE(spec.wishart.has_value());
    // 4 x 3 input has M > N, so ingestion transposes it.
    CHECK(spec.wishart->swapped());
    CHECK(spec.wishart->rows() == 3);
    CHECK(spec.wishart->cols() == 4);
    auto emb = build_wishart_embedding(*spec.wishart);
    CHECK(emb.cov.dim() == 7);
}

TEST_CASE("4 x 7 grid of independent blocks parses as wishart") {
    // One independent non-selfadjoint name per band position, r = 4, s = 7.
    auto spec = preset("mimo:4,4,1");
    CHECK(spec.wishart->rows() == 4);
    CHECK(spec.wishart->cols() == 7);
    CHECK(spec.wishart->all_nonselfadjoint());
    CHECK(spec.wishart->equal_square_blocks());
}

TEST_SUITE_END();
