// Contour extraction of the 1/z-series coefficients of tr G. At |z| = 100
// the m_8 term contributes ~1e-15 relative to tr G, far below double
// rounding, so the fixed-point solves and the quadrature run in quad
// precision (float128 where available). This route shares no code with the
// Newton solver: plain iteration of G <- (zI - eta(G))^-1, which is a
// contraction for |z| beyond the support.
//
// Only +,-,*,/ are needed in extended precision: square roots come from a
// Newton refinement of the double value and the contour phases from exact
// half-angle recursion, so no quadmath library is involved and the file
// builds the same under gcc and clang.

#include <cmath>
#include <vector>

#include "blockspec/oracle.hpp"

namespace blockspec {
namespace {

#ifdef BLOCKSPEC_HAVE_FLOAT128
using qreal = __float128;
constexpr long double kFixedPointTol = 1e-30L;
#else
using qreal = long double;
constexpr long double kFixedPointTol = 1e-16L;
#endif

inline qreal qabs(qreal x) { return x < 0 ? -x : x; }

// Newton refinement of the double square root; two steps reach full
// precision from a 1e-16 seed.
inline qreal qsqrt(qreal a) {
    if (a <= 0) return 0;
    qreal x = std::sqrt(static_cast<double>(a));
    for (int it = 0; it < 3; ++it) x = (x + a / x) / 2;
    return x;
}

struct QC {
    qreal re = 0;
    qreal im = 0;
};

inline QC operator+(QC a, QC b) { return {a.re + b.re, a.im + b.im}; }
inline QC operator-(QC a, QC b) { return {a.re - b.re, a.im - b.im}; }
inline QC operator*(QC a, QC b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline QC operator*(qreal s, QC a) { return {s * a.re, s * a.im}; }
inline qreal abs1(QC a) { return qabs(a.re) + qabs(a.im); }
inline QC inv(QC a) {
    // Smith's scheme keeps the division well scaled.
    if (qabs(a.re) >= qabs(a.im)) {
        const qreal r = a.im / a.re;
        const qreal den = a.re + a.im * r;
        return {1 / den, -r / den};
    }
    const qreal r = a.re / a.im;
    const qreal den = a.re * r + a.im;
    return {r / den, -1 / den};
}

/// Roots of unity e^(i pi t / half), t = 0 .. 2*half-1, from half-angle
/// recursion off cos(pi/4) = sqrt(1/2).
std::vector<QC> phase_table(int half) {
    qreal c = qsqrt(qreal(0.5));
    qreal s = c;
    for (int angle = 4; angle < half; angle *= 2) {
        const qreal cn = qsqrt((1 + c) / 2);
        s = qsqrt((1 - c) / 2);
        c = cn;
    }
    std::vector<QC> table(2 * half);
    table[0] = QC{1, 0};
    const QC step{c, s};
    for (int t = 1; t < 2 * half; ++t) table[t] = table[t - 1] * step;
    return table;
}

using QMat = std::vector<QC>;  // d x d row-major

QMat identity(int d) {
    QMat I(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i) I[i * d + i] = QC{1, 0};
    return I;
}

QMat inverse(QMat a, int d) {
    QMat inv_m = identity(d);
    for (int col = 0; col < d; ++col) {
        int piv = col;
        qreal best = abs1(a[col * d + col]);
        for (int rr = col + 1; rr < d; ++rr)
            if (abs1(a[rr * d + col]) > best) { best = abs1(a[rr * d + col]); piv = rr; }
        if (best == 0) throw SolveError(SolveError::Kind::SingularJacobian,
                                        "singular matrix in series extraction");
        if (piv != col)
            for (int j = 0; j < d; ++j) {
                std::swap(a[piv * d + j], a[col * d + j]);
                std::swap(inv_m[piv * d + j], inv_m[col * d + j]);
            }
        const QC pinv = inv(a[col * d + col]);
        for (int j = 0; j < d; ++j) {
            a[col * d + j] = pinv * a[col * d + j];
            inv_m[col * d + j] = pinv * inv_m[col * d + j];
        }
        for (int rr = 0; rr < d; ++rr) {
            if (rr == col) continue;
            const QC f = a[rr * d + col];
            if (f.re == 0 && f.im == 0) continue;
            for (int j = 0; j < d; ++j) {
                a[rr * d + j] = a[rr * d + j] - f * a[col * d + j];
                inv_m[rr * d + j] = inv_m[rr * d + j] - f * inv_m[col * d + j];
            }
        }
    }
    return inv_m;
}

struct EtaPlanQ {
    struct Term {
        int out, k, l;
        QC w;
    };
    int d;
    std::vector<Term> terms;
    std::vector<qreal> trace_w;

    explicit EtaPlanQ(const ModelSpec& spec) : d(spec.cov.dim()) {
        trace_w.resize(d);
        for (int i = 0; i < d; ++i)
            trace_w[i] = spec.square() ? qreal(1) / d : qreal(spec.dims.alpha_value(i));
        for (const auto& e : spec.cov.nonzeros()) {
            // sigma(i,k;l,j) feeds output (i,j) from input (k,l)
            const int i = e.i, k = e.j, l = e.k, j = e.l;
            const qreal w = trace_w[k];
            terms.push_back({i * d + j, k, l,
                             QC{w * qreal(e.value.real()), w * qreal(e.value.imag())}});
        }
    }

    QMat apply(const QMat& D) const {
        QMat out(static_cast<std::size_t>(d) * d);
        for (const auto& t : terms) out[t.out] = out[t.out] + t.w * D[t.k * d + t.l];
        return out;
    }
};

}  // namespace

std::vector<double> moments_from_cauchy_series(const ModelSpec& spec, int max_m,
                                               double radius) {
    const int d = spec.cov.dim();
    const EtaPlanQ eta(spec);
    const int J = 64;
    const qreal R = radius;
    // theta_j = (2j+1) pi / J and all contour phases are multiples of pi/J
    const auto phases = phase_table(J);

    std::vector<QC> gvals(J);  // tr G at the J contour points

    for (int j = 0; j < J / 2; ++j) {  // upper semicircle; lower by reflection
        const QC dir = phases[(2 * j + 1) % (2 * J)];
        const QC z{R * dir.re, R * dir.im};

        // G <- (zI - eta(G))^-1 from G = I/z; a contraction out here.
        QMat G = identity(d);
        const QC zi = inv(z);
        for (auto& g : G) g = g * zi;
        bool done = false;
        for (int it = 0; it < 500; ++it) {
            QMat A = eta.apply(G);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    A[r * d + c] = QC{0, 0} - A[r * d + c];
                    if (r == c) A[r * d + c] = A[r * d + c] + z;
                }
            QMat next = inverse(std::move(A), d);
            qreal delta = 0;
            for (std::size_t t = 0; t < next.size(); ++t)
                delta = std::max<qreal>(delta, abs1(next[t] - G[t]));
            G = std::move(next);
            if (delta < qreal(kFixedPointTol)) { done = true; break; }
        }
        if (!done)
            throw SolveError(SolveError::Kind::NonConvergence,
                             "series extraction: fixed point did not contract; radius too small?");

        QC tr{0, 0};
        for (int i = 0; i < d; ++i) tr = tr + eta.trace_w[i] * G[i * d + i];
        gvals[j] = tr;
        gvals[J - 1 - j] = QC{tr.re, -tr.im};  // G(conj z) = conj G(z)
    }

    // m_k = (R^(k+1)/J) sum_j e^(i (k+1) theta_j) tr G(z_j)
    std::vector<double> moments(max_m + 1);
    for (int k = 0; k <= max_m; ++k) {
        QC acc{0, 0};
        for (int j = 0; j < J; ++j) {
            const int idx = ((k + 1) * (2 * j + 1)) % (2 * J);
            acc = acc + phases[idx] * gvals[j];
        }
        qreal scale = 1;
        for (int t = 0; t <= k; ++t) scale *= R;
        moments[k] = static_cast<double>(scale * acc.re / qreal(J));
    }
    return moments;
}

}  // namespace blockspec
