#pragma once

#include <vector>

#include "blockspec/eta.hpp"
#include "blockspec/model.hpp"

namespace blockspec {

/// A perfect matching of {1..m}: partner[partner[p]] == p, partner[p] != p.
/// Stored 0-based.
struct Pairing {
    int m = 0;
    std::vector<int> partner;

    bool valid() const;
};

struct GenusWeight {
    int cycles = 0;    // #(gamma pi), gamma = (1, 2, ..., m)
    int exponent = 0;  // #(gamma pi) - m/2 - 1; 0 exactly for non-crossing
};

/// All of P2(m), or only the non-crossing subset. Odd m yields the empty
/// list. Enumeration is capped at m = 16.
std::vector<Pairing> enumerate_pairings(int m, bool noncrossing_only);

/// Non-crossing test by repeated removal of adjacent blocks.
bool is_noncrossing(const Pairing& pi);

GenusWeight genus_weight(const Pairing& pi);

enum class RemovalOrder { FirstBlock, LeftmostAdjacent, RightmostAdjacent };

/// Nested-eta value of a non-crossing pairing, e.g. {(1,4),(2,3),(5,6)} |->
/// eta(eta(I)) * eta(I). The three removal orders must agree; exposing them
/// makes the well-definedness testable. Throws on crossing pairings.
Matrix kappa_pi(const EtaMap& eta, const Pairing& pi,
                RemovalOrder order = RemovalOrder::FirstBlock);

/// m-th limiting moment of the block-matrix law: weighted trace of the sum
/// of kappa_pi over NC2(m). Odd m gives 0. Enumeration route, m <= 16.
double limiting_moment(const EtaMap& eta, int m);
double limiting_moment(const ModelSpec& spec, int m);

/// Matrix moments E[X^0..X^max_m] via the recurrence
/// E[X^m] = sum_k eta(E[X^k]) E[X^(m-k-2)]; m <= 32.
std::vector<Matrix> limiting_moment_recursive(const EtaMap& eta, int max_m);

/// Exact finite-n expected trace E[tr_n(X^m)], all genera included. Square
/// mode takes the total size n; rectangular mode weighs each cycle of
/// gamma pi with its block size fraction N_i/n. m <= 10.
double finite_n_moment(const ModelSpec& spec, int m, std::int64_t n_total);

/// Moments of tr G extracted from the solved Cauchy transform by a contour
/// integral on |z| = radius. Runs its own quad-precision fixed-point solves,
/// independent of the Newton path. Returns m_0..m_max.
std::vector<double> moments_from_cauchy_series(const ModelSpec& spec, int max_m,
                                               double radius = 100.0);

}  // namespace blockspec
