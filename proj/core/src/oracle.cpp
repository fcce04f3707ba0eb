#include "blockspec/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace blockspec {

bool Pairing::valid() const {
    if (m <= 0 || m % 2 != 0 || partner.size() != static_cast<std::size_t>(m)) return false;
    for (int p = 0; p < m; ++p) {
        if (partner[p] < 0 || partner[p] >= m || partner[p] == p) return false;
        if (partner[partner[p]] != p) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace {

void enumerate_all(std::vector<int>& partner, std::vector<Pairing>& out, int m) {
    int first = -1;
    for (int p = 0; p < m; ++p)
        if (partner[p] < 0) { first = p; break; }
    if (first < 0) {
        out.push_back(Pairing{m, partner});
        return;
    }
    for (int q = first + 1; q < m; ++q) {
        if (partner[q] >= 0) continue;
        partner[first] = q;
        partner[q] = first;
        enumerate_all(partner, out, m);
        partner[first] = -1;
        partner[q] = -1;
    }
}

// Non-crossing pairings of positions [lo, hi): pair lo with an odd-distance
// partner and recurse into the inside and the tail.
void enumerate_nc(std::vector<int>& partner, std::vector<Pairing>& out, int m, int lo, int hi,
                  std::vector<std::pair<int, int>>& spans) {
    if (lo >= hi) {
        if (spans.empty()) {
            out.push_back(Pairing{m, partner});
            return;
        }
        auto [a, b] = spans.back();
        spans.pop_back();
        enumerate_nc(partner, out, m, a, b, spans);
        spans.push_back({a, b});
        return;
    }
    for (int q = lo + 1; q < hi; q += 2) {
        partner[lo] = q;
        partner[q] = lo;
        spans.push_back({q + 1, hi});
        enumerate_nc(partner, out, m, lo + 1, q, spans);
        spans.pop_back();
        partner[lo] = -1;
        partner[q] = -1;
    }
}

}  // namespace

std::vector<Pairing> enumerate_pairings(int m, bool noncrossing_only) {
    if (m % 2 != 0 || m <= 0) return {};
    if (m > 16) throw ValidationError("pairing enumeration capped at m = 16");
    std::vector<Pairing> out;
    std::vector<int> partner(m, -1);
    if (noncrossing_only) {
        std::vector<std::pair<int, int>> spans;
        enumerate_nc(partner, out, m, 0, m, spans);
    } else {
        enumerate_all(partner, out, m);
    }
    return out;
}

bool is_noncrossing(const Pairing& pi) {
    if (!pi.valid()) return false;
    // Repeatedly delete blocks of two neighbours in the surviving sequence.
    std::vector<int> seq(pi.m);
    for (int p = 0; p < pi.m; ++p) seq[p] = p;
    bool removed = true;
    while (!seq.empty() && removed) {
        removed = false;
        for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
            if (pi.partner[seq[t]] == seq[t + 1]) {
                seq.erase(seq.begin() + t, seq.begin() + t + 2);
                removed = true;
                break;
            }
        }
    }
    return seq.empty();
}

GenusWeight genus_weight(const Pairing& pi) {
    const int m = pi.m;
    std::vector<bool> seen(m, false);
    int cycles = 0;
    for (int p = 0; p < m; ++p) {
        if (seen[p]) continue;
        ++cycles;
        int q = p;
        while (!seen[q]) {
            seen[q] = true;
            q = (pi.partner[q] + 1) % m;  // gamma pi: apply pi first
        }
    }
    return GenusWeight{cycles, cycles - m / 2 - 1};
}

// ---------------------------------------------------------------------------
// kappa_pi
// ---------------------------------------------------------------------------

namespace {

// First-block decomposition: pi = (first, r) u inner u outer gives
// kappa = eta(kappa_inner) * kappa_outer.
Matrix kappa_first_block(const EtaMap& eta, const Pairing& pi, const std::vector<int>& elems) {
    if (elems.empty()) return Matrix::Identity(eta.dim(), eta.dim());
    const int a = elems.front();
    const int b = pi.partner[a];
    std::vector<int> inner, outer;
    for (int e : elems) {
        if (e == a || e == b) continue;
        (e < b ? inner : outer).push_back(e);
    }
    return eta.apply(kappa_first_block(eta, pi, inner)) * kappa_first_block(eta, pi, outer);
}

// Token reduction: replace an innermost adjacent block (only matrix tokens
// between the two elements) by eta(product of those matrices).
Matrix kappa_by_removal(const EtaMap& eta, const Pairing& pi, bool leftmost) {
    struct Token {
        int elem;  // -1 for matrix tokens
        Matrix mat;
    };
    const int d = eta.dim();
    std::vector<Token> toks;
    toks.reserve(pi.m);
    for (int p = 0; p < pi.m; ++p) toks.push_back(Token{p, Matrix()});

    while (true) {
        bool any_elem = false;
        int chosen = -1;
        for (std::size_t t = 0; t < toks.size(); ++t) {
            if (toks[t].elem < 0) continue;
            any_elem = true;
            // partner must follow with only matrix tokens in between
            std::size_t u = t + 1;
            while (u < toks.size() && toks[u].elem < 0) ++u;
            if (u < toks.size() && toks[u].elem == pi.partner[toks[t].elem]) {
                chosen = static_cast<int>(t);
                if (leftmost) break;
            }
        }
        if (!any_elem) break;
        if (chosen < 0) throw ValidationError("kappa_pi is defined only for non-crossing pairings");

        std::size_t t = static_cast<std::size_t>(chosen);
        std::size_t u = t + 1;
        Matrix between = Matrix::Identity(d, d);
        while (toks[u].elem < 0) {
            between = between * toks[u].mat;
            ++u;
        }
        Token repl{-1, eta.apply(between)};
        toks.erase(toks.begin() + t, toks.begin() + u + 1);
        toks.insert(toks.begin() + t, std::move(repl));
    }

    Matrix acc = Matrix::Identity(d, d);
    for (const auto& t : toks) acc = acc * t.mat;
    return acc;
}

}  // namespace

Matrix kappa_pi(const EtaMap& eta, const Pairing& pi, RemovalOrder order) {
    if (!pi.valid()) throw ValidationError("invalid pairing");
    if (!is_noncrossing(pi))
        throw ValidationError("kappa_pi is defined only for non-crossing pairings");
    switch (order) {
        case RemovalOrder::FirstBlock: {
            std::vector<int> elems(pi.m);
            for (int p = 0; p < pi.m; ++p) elems[p] = p;
            return kappa_first_block(eta, pi, elems);
        }
        case RemovalOrder::LeftmostAdjacent:
            return kappa_by_removal(eta, pi, true);
        case RemovalOrder::RightmostAdjacent:
            return kappa_by_removal(eta, pi, false);
    }
    throw ValidationError("unknown removal order");
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

double limiting_moment(const EtaMap& eta, int m) {
    if (m < 0) throw ValidationError("moment order must be nonnegative");
    if (m == 0) return 1.0;
    if (m % 2 != 0) return 0.0;
    if (m > 16) throw ValidationError("enumeration route capped at m = 16");
    Matrix sum = Matrix::Zero(eta.dim(), eta.dim());
    for (const auto& pi : enumerate_pairings(m, true)) sum += kappa_pi(eta, pi);
    return eta.trace(sum).real();
}

double limiting_moment(const ModelSpec& spec, int m) {
    return limiting_moment(eta_for(spec), m);
}

std::vector<Matrix> limiting_moment_recursive(const EtaMap& eta, int max_m) {
    if (max_m > 32) throw ValidationError("recurrence route capped at m = 32");
    const int d = eta.dim();
    std::vector<Matrix> mom;
    mom.reserve(max_m + 1);
    mom.push_back(Matrix::Identity(d, d));
    if (max_m >= 1) mom.push_back(Matrix::Zero(d, d));
    for (int m = 2; m <= max_m; ++m) {
        Matrix acc = Matrix::Zero(d, d);
        for (int k = 0; k <= m - 2; ++k) acc += eta.apply(mom[k]) * mom[m - k - 2];
        mom.push_back(std::move(acc));
    }
    return mom;
}

double finite_n_moment(const ModelSpec& spec, int m, std::int64_t n_total) {
    if (m < 0) throw ValidationError("moment order must be nonnegative");
    if (m == 0) return 1.0;
    if (m % 2 != 0) return 0.0;
    if (m > 10) throw ValidationError("genus expansion capped at m = 10");
    if (n_total <= 0) throw ValidationError("finite_n_moment needs n >= 1");

    const int d = spec.cov.dim();
    const bool rect = !spec.square();
    const double n = static_cast<double>(n_total);

    // Per-index size fractions N_i/n (exactly alpha_i; cycles of gamma pi are
    // weighted by the fraction of their common block index).
    std::vector<double> frac(d);
    for (int i = 0; i < d; ++i) frac[i] = rect ? spec.dims.alpha_value(i) : 1.0 / d;

    double total = 0.0;
    for (const auto& pi : enumerate_pairings(m, false)) {
        const GenusWeight gw = genus_weight(pi);

        // cycle id per position of gamma pi
        std::vector<int> cyc(m, -1);
        int ncyc = 0;
        for (int p = 0; p < m; ++p) {
            if (cyc[p] >= 0) continue;
            int q = p;
            while (cyc[q] < 0) {
                cyc[q] = ncyc;
                q = (pi.partner[q] + 1) % m;
            }
            ++ncyc;
        }
        std::vector<int> cyc_rep(ncyc, -1);  // first position of each cycle
        for (int p = 0; p < m; ++p)
            if (cyc_rep[cyc[p]] < 0) cyc_rep[cyc[p]] = p;

        // sigma factors: block (p, q) of pi contributes
        // sigma(i(p), i(p+1); i(q), i(q+1)), indices cyclic.
        std::vector<std::array<int, 4>> factors;
        for (int p = 0; p < m; ++p) {
            const int q = pi.partner[p];
            if (p < q) factors.push_back({p, (p + 1) % m, q, (q + 1) % m});
        }
        // factor becomes decidable once its largest position index is assigned
        std::vector<std::vector<int>> ready(m);
        for (std::size_t f = 0; f < factors.size(); ++f) {
            int last = 0;
            for (int pos : factors[f]) last = std::max(last, pos);
            ready[last].push_back(static_cast<int>(f));
        }

        std::vector<int> idx(m, 0);
        double sum = 0.0;
        // depth-first over index assignments with early zero pruning
        auto dfs = [&](auto&& self, int pos, Complex partial) -> void {
            if (pos == m) {
                sum += partial.real();
                return;
            }
            for (int v = 0; v < d; ++v) {
                idx[pos] = v;
                Complex prod = partial;
                if (cyc_rep[cyc[pos]] == pos) prod *= frac[v];
                bool dead = false;
                for (int f : ready[pos]) {
                    const auto& a = factors[f];
                    const Complex s = spec.cov.sigma(idx[a[0]], idx[a[1]], idx[a[2]], idx[a[3]]);
                    if (s == Complex(0.0, 0.0)) { dead = true; break; }
                    prod *= s;
                }
                if (!dead) self(self, pos + 1, prod);
            }
        };
        dfs(dfs, 0, Complex(1.0, 0.0));

        total += std::pow(n, gw.exponent) * sum;
    }
    return total;
}

}  // namespace blockspec
