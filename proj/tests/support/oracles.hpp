#pragma once

// Closed-form reference transforms and model generators shared by the unit
// tests and the acceptance suite. Everything here is independent of the
// solver path it is used to check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "blockspec/model.hpp"

namespace blockspec::testing {

/// Cauchy transform of the semicircle law on [-2, 2]:
/// g(z) = (z - sqrt(z - 2) sqrt(z + 2)) / 2. The principal-branch product is
/// analytic on the upper half plane and behaves like 1/z at infinity, which
/// pins the Herglotz branch.
inline Complex semicircle_G(Complex z) {
    return 0.5 * (z - std::sqrt(z - 2.0) * std::sqrt(z + 2.0));
}

inline double semicircle_density(double x) {
    return std::abs(x) >= 2.0 ? 0.0 : std::sqrt(4.0 - x * x) / (2.0 * 3.14159265358979323846);
}

/// Marchenko-Pastur(lambda) transform,
/// G(z) = (z + 1 - lambda - sqrt(z - a) sqrt(z - b)) / (2 z),
/// a = (1 - sqrt(lambda))^2, b = (1 + sqrt(lambda))^2.
inline Complex mp_G(double lambda, Complex z) {
    const double sl = std::sqrt(lambda);
    const double a = (1.0 - sl) * (1.0 - sl);
    const double b = (1.0 + sl) * (1.0 + sl);
    return (z + (1.0 - lambda) - std::sqrt(z - a) * std::sqrt(z - b)) / (2.0 * z);
}

inline double mp_density(double lambda, double x) {
    const double sl = std::sqrt(lambda);
    const double a = (1.0 - sl) * (1.0 - sl);
    const double b = (1.0 + sl) * (1.0 + sl);
    if (x <= a || x >= b) return 0.0;
    return std::sqrt((x - a) * (b - x)) / (2.0 * 3.14159265358979323846 * x);
}

inline double catalan(int k) {
    double c = 1.0;
    for (int t = 0; t < k; ++t) c = c * 2.0 * (2.0 * t + 1.0) / (t + 2.0);
    return c;
}

/// Random valid block grid: selfadjoint names stay on square blocks, mirror
/// entries keep the grid self-adjoint, occasional declared correlations.
inline BlockGrid random_grid(std::mt19937_64& rng, int max_d = 5) {
    std::uniform_int_distribution<int> d_dist(1, max_d);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int d = d_dist(rng);

    std::uniform_int_distribution<int> names_dist(1, 3);
    const int n_names = names_dist(rng);
    std::vector<BlockName> names;
    for (int t = 0; t < n_names; ++t) {
        BlockName nm;
        nm.label = std::string(1, static_cast<char>('A' + t));
        nm.selfadjoint = unif(rng) < 0.5;
        names.push_back(nm);
    }
    if (n_names >= 2 && names[0].selfadjoint == names[1].selfadjoint && unif(rng) < 0.25) {
        names[1].correlated_with = names[0].label;
        names[1].rho = 2.0 * unif(rng) - 1.0;
    }

    auto scale = [&] {
        const double opts[] = {1.0, 1.0, -1.0, 0.5, 2.0};
        return opts[static_cast<int>(unif(rng) * 5.0) % 5];
    };

    std::vector<std::optional<BlockRef>> entries(static_cast<std::size_t>(d) * d);
    bool placed_any = false;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            if (unif(rng) > 0.55 && !(i == 0 && j == 0 && !placed_any && d == 1)) continue;
            std::uniform_int_distribution<int> pick(0, n_names - 1);
            int t = pick(rng);
            if (i == j && !names[t].selfadjoint) {
                int sa = -1;
                for (int u = 0; u < n_names; ++u)
                    if (names[u].selfadjoint) sa = u;
                if (sa < 0) continue;
                t = sa;
            }
            const double s = scale();
            entries[i * d + j] = BlockRef{t, false, s};
            if (i != j)
                entries[j * d + i] = BlockRef{t, !names[t].selfadjoint, s};
            placed_any = true;
        }
    }
    if (!placed_any) {
        int sa = -1;
        for (int u = 0; u < n_names; ++u)
            if (names[u].selfadjoint) sa = u;
        if (sa < 0) {
            names[0].selfadjoint = true;
            names[0].correlated_with.reset();
            for (auto& nm : names)
                if (nm.correlated_with == names[0].label) nm.correlated_with.reset();
            sa = 0;
        }
        entries[0] = BlockRef{sa, false, 1.0};
    }
    return BlockGrid(d, std::move(names), std::move(entries));
}

inline ModelSpec random_model(std::mt19937_64& rng, int max_d = 5) {
    BlockGrid grid = random_grid(rng, max_d);
    const int d = grid.dim();
    ModelSpec spec{derive_sigma(grid), DimensionProfile::square(d), std::move(grid)};
    return spec;
}

/// d = 1 semicircle model (sigma = 1).
inline ModelSpec scalar_model() {
    std::vector<BlockName> names{BlockName{"A", true, {}, 0.0}};
    std::vector<std::optional<BlockRef>> entries{BlockRef{0, false, 1.0}};
    BlockGrid grid(1, std::move(names), std::move(entries));
    return ModelSpec{derive_sigma(grid), DimensionProfile::square(1), std::move(grid)};
}

/// sigma == 0 explicit model.
inline ModelSpec zero_model(int d) {
    return ModelSpec{CovarianceTensor(d), DimensionProfile::square(d), std::nullopt};
}

}  // namespace blockspec::testing
