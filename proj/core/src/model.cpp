#include "blockspec/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

namespace blockspec {

namespace {

std::string entry_name(int i, int j) {
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

std::string sigma_name(int i, int j, int k, int l) {
    return "sigma(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ";" +
           std::to_string(k + 1) + "," + std::to_string(l + 1) + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::int64_t p = std::stoll(text.substr(0, slash));
        const std::int64_t q = std::stoll(text.substr(slash + 1));
        return Rational(p, q);
    }
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
        const std::string frac = text.substr(dot + 1);
        if (frac.size() > 15) throw ValidationError("decimal too long for exact rational: " + text);
        std::int64_t den = 1;
        for (std::size_t t = 0; t < frac.size(); ++t) den *= 10;
        const std::int64_t whole = dot == 0 ? 0 : std::stoll(text.substr(0, dot));
        const bool neg = !text.empty() && text[0] == '-';
        std::int64_t num = std::llabs(whole) * den + (frac.empty() ? 0 : std::stoll(frac));
        if (neg) num = -num;
        return Rational(num, den);
    }
    return Rational(std::stoll(text), 1);
}

// ---------------------------------------------------------------------------
// CovarianceTensor
// ---------------------------------------------------------------------------

std::vector<CovarianceTensor::Entry>::const_iterator
CovarianceTensor::find(int i, int j, int k, int l) const {
    const auto key = std::make_tuple(i, j, k, l);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const Entry& e, const std::tuple<int, int, int, int>& t) {
                                   return std::make_tuple(e.i, e.j, e.k, e.l) < t;
                               });
    if (it != entries_.end() && std::make_tuple(it->i, it->j, it->k, it->l) == key) return it;
    return entries_.end();
}

void CovarianceTensor::set(int i, int j, int k, int l, Complex v) {
    for (int idx : {i, j, k, l}) {
        if (idx < 0 || idx >= d_)
            throw ValidationError("covariance index out of range at " + sigma_name(i, j, k, l));
    }
    const auto key = std::make_tuple(i, j, k, l);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const Entry& e, const std::tuple<int, int, int, int>& t) {
                                   return std::make_tuple(e.i, e.j, e.k, e.l) < t;
                               });
    if (it != entries_.end() && std::make_tuple(it->i, it->j, it->k, it->l) == key) {
        if (v == Complex(0.0, 0.0)) entries_.erase(it);
        else it->value = v;
        return;
    }
    if (v != Complex(0.0, 0.0)) entries_.insert(it, Entry{i, j, k, l, v});
}

Complex CovarianceTensor::sigma(int i, int j, int k, int l) const {
    auto it = find(i, j, k, l);
    return it == entries_.end() ? Complex(0.0, 0.0) : it->value;
}

// ---------------------------------------------------------------------------
// DimensionProfile
// ---------------------------------------------------------------------------

DimensionProfile::DimensionProfile(Mode mode, std::vector<Rational> alpha)
    : mode_(mode), alpha_(std::move(alpha)) {
    if (alpha_.empty()) throw ValidationError("dimension profile needs d >= 1");
    Rational sum(0);
    for (const auto& a : alpha_) {
        if (a.num() <= 0) throw ValidationError("alpha entries must be positive");
        sum = sum + a;
    }
    if (sum != Rational(1)) throw ValidationError("alpha must sum to 1 exactly, got " + sum.str());
}

DimensionProfile DimensionProfile::square(int d) {
    if (d <= 0) throw ValidationError("square profile needs d >= 1");
    return DimensionProfile(Mode::Square, std::vector<Rational>(d, Rational(1, d)));
}

DimensionProfile DimensionProfile::rectangular(const std::vector<std::int64_t>& sizes) {
    if (sizes.empty()) throw ValidationError("rectangular profile needs at least one size");
    std::int64_t n = 0;
    for (std::int64_t s : sizes) {
        if (s <= 0) throw ValidationError("block sizes must be positive");
        n += s;
    }
    std::vector<Rational> alpha;
    alpha.reserve(sizes.size());
    for (std::int64_t s : sizes) alpha.emplace_back(s, n);
    return DimensionProfile(Mode::Rectangular, std::move(alpha));
}

DimensionProfile DimensionProfile::rectangular_alpha(const std::vector<Rational>& alpha) {
    return DimensionProfile(Mode::Rectangular, alpha);
}

std::int64_t DimensionProfile::size_denominator() const {
    std::int64_t q = 1;
    for (const auto& a : alpha_) q = std::lcm(q, a.den());
    return q;
}

std::vector<int> DimensionProfile::block_sizes(int unit) const {
    const std::int64_t q = size_denominator();
    std::vector<int> sizes;
    sizes.reserve(alpha_.size());
    for (const auto& a : alpha_)
        sizes.push_back(static_cast<int>(unit * (a.num() * (q / a.den()))));
    return sizes;
}

bool DimensionProfile::uniform() const {
    for (const auto& a : alpha_)
        if (a != alpha_[0]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// BlockGrid
// ---------------------------------------------------------------------------

BlockGrid::BlockGrid(int d, std::vector<BlockName> names,
                     std::vector<std::optional<BlockRef>> entries)
    : d_(d), names_(std::move(names)), entries_(std::move(entries)) {
    if (d_ <= 0) throw ValidationError("grid needs d >= 1");
    if (entries_.size() != static_cast<std::size_t>(d_) * d_)
        throw ValidationError("grid entry array is not d x d");
    validate();
}

int BlockGrid::name_index(const std::string& label) const {
    for (std::size_t t = 0; t < names_.size(); ++t)
        if (names_[t].label == label) return static_cast<int>(t);
    return -1;
}

void BlockGrid::validate() const {
    for (const auto& e : entries_) {
        if (!e) continue;
        if (e->name < 0 || e->name >= static_cast<int>(names_.size()))
            throw ValidationError("grid references an undeclared block name");
    }
    for (const auto& nm : names_) {
        if (nm.correlated_with) {
            const int base = name_index(*nm.correlated_with);
            if (base < 0)
                throw ValidationError("name " + nm.label + " correlated with undeclared name " +
                                      *nm.correlated_with);
            const BlockName& b = names_[base];
            if (b.correlated_with)
                throw ValidationError("correlation chains are not supported (" + nm.label + ")");
            if (b.selfadjoint != nm.selfadjoint)
                throw ValidationError("correlated names must be of the same kind (" + nm.label + ")");
            if (!(nm.rho >= -1.0 && nm.rho <= 1.0))
                throw ValidationError("correlation rho out of [-1,1] for " + nm.label);
        }
    }
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            const auto& e = at(i, j);
            const auto& et = at(j, i);
            if (static_cast<bool>(e) != static_cast<bool>(et))
                throw ValidationError("grid not self-adjoint: entry " + entry_name(i, j) +
                                      " present but " + entry_name(j, i) + " missing");
            if (!e) continue;
            if (i == j) {
                if (!names_[e->name].selfadjoint)
                    throw ValidationError("diagonal entry " + entry_name(i, i) +
                                          " references non-selfadjoint name " +
                                          names_[e->name].label);
                if (e->adjoint)
                    throw ValidationError("diagonal entry " + entry_name(i, i) +
                                          " must not carry an adjoint flag");
            }
            if (e->name != et->name)
                throw ValidationError("grid not self-adjoint: names differ at " + entry_name(i, j) +
                                      " / " + entry_name(j, i));
            if (e->scale != et->scale)
                throw ValidationError("grid not self-adjoint: scales differ at " + entry_name(i, j));
            if (!names_[e->name].selfadjoint && i != j && e->adjoint == et->adjoint)
                throw ValidationError("grid not self-adjoint: entry " + entry_name(j, i) +
                                      " must reference the adjoint of entry " + entry_name(i, j));
        }
    }
}

// ---------------------------------------------------------------------------
// derive_sigma / validate_sigma
// ---------------------------------------------------------------------------

CovarianceTensor derive_sigma(const BlockGrid& grid) {
    const int d = grid.dim();
    const auto& names = grid.names();
    CovarianceTensor cov(d);

    // Pairwise covariance of two placed names; the entry deltas of Eq-style
    // covariances demand name(i,j) ~ name(l,k) with matching adjoint flags.
    auto name_cov = [&](const BlockRef& a, const BlockRef& b) -> double {
        const BlockName& na = names[a.name];
        const BlockName& nb = names[b.name];
        const bool flags_match = na.selfadjoint || a.adjoint == b.adjoint;
        if (a.name == b.name) return flags_match ? 1.0 : 0.0;
        // declared fractional correlation between distinct names
        double rho = 0.0;
        if (na.correlated_with && grid.name_index(*na.correlated_with) == b.name) rho = na.rho;
        if (nb.correlated_with && grid.name_index(*nb.correlated_with) == a.name) rho = nb.rho;
        if (rho == 0.0) return 0.0;
        return flags_match ? rho : 0.0;
    };

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& e = grid.at(i, j);
            if (!e) continue;
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    const auto& f = grid.at(l, k);
                    if (!f) continue;
                    const double c = name_cov(*e, *f);
                    if (c != 0.0) cov.set(i, j, k, l, Complex(e->scale * f->scale * c, 0.0));
                }
        }
    return cov;
}

std::vector<SigmaViolation> validate_sigma(const CovarianceTensor& cov,
                                           const DimensionProfile& dims) {
    std::vector<SigmaViolation> out;
    if (cov.dim() != dims.dim()) {
        out.push_back({"dimension mismatch between sigma and alpha"});
        return out;
    }
    const double tol = 1e-12;
    for (const auto& e : cov.nonzeros()) {
        const Complex mirror = cov.sigma(e.k, e.l, e.i, e.j);
        if (std::abs(e.value - std::conj(mirror)) > tol)
            out.push_back({"symmetry violation at " + sigma_name(e.i, e.j, e.k, e.l) + ": " +
                           sigma_name(e.k, e.l, e.i, e.j) + " is not its conjugate"});
        if (dims.mode() == DimensionProfile::Mode::Rectangular) {
            const auto& a = dims.alpha();
            if (a[e.i] != a[e.l] || a[e.j] != a[e.k])
                out.push_back({"fitting violation at " + sigma_name(e.i, e.j, e.k, e.l) +
                               ": alpha_i != alpha_l or alpha_j != alpha_k"});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// WishartSpec / embedding
// ---------------------------------------------------------------------------

WishartSpec::WishartSpec(int r, int s, std::vector<BlockName> names,
                         std::vector<std::optional<BlockRef>> hgrid,
                         std::vector<std::int64_t> row_sizes,
                         std::vector<std::int64_t> col_sizes)
    : r_(r), s_(s), names_(std::move(names)), hgrid_(std::move(hgrid)),
      row_sizes_(std::move(row_sizes)), col_sizes_(std::move(col_sizes)) {
    if (r_ <= 0 || s_ <= 0) throw ValidationError("wishart grid needs r, s >= 1");
    if (hgrid_.size() != static_cast<std::size_t>(r_) * s_)
        throw ValidationError("wishart grid entry array is not r x s");
    if (row_sizes_.size() != static_cast<std::size_t>(r_) ||
        col_sizes_.size() != static_cast<std::size_t>(s_))
        throw ValidationError("wishart sizes must list r row sizes and s column sizes");
    for (auto v : row_sizes_)
        if (v <= 0) throw ValidationError("wishart row sizes must be positive");
    for (auto v : col_sizes_)
        if (v <= 0) throw ValidationError("wishart column sizes must be positive");
    for (const auto& e : hgrid_) {
        if (!e) continue;
        if (e->name < 0 || e->name >= static_cast<int>(names_.size()))
            throw ValidationError("wishart grid references an undeclared block name");
    }

    // Normalize to M <= N by exchanging the roles of H and H*.
    if (total_rows() > total_cols()) {
        std::vector<std::optional<BlockRef>> t(hgrid_.size());
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < s_; ++j) {
                auto e = hgrid_[i * s_ + j];
                if (e && !names_[e->name].selfadjoint) e->adjoint = !e->adjoint;
                t[j * r_ + i] = e;
            }
        hgrid_ = std::move(t);
        std::swap(r_, s_);
        std::swap(row_sizes_, col_sizes_);
        swapped_ = true;
    }
}

std::int64_t WishartSpec::total_rows() const {
    std::int64_t m = 0;
    for (auto v : row_sizes_) m += v;
    return m;
}

std::int64_t WishartSpec::total_cols() const {
    std::int64_t n = 0;
    for (auto v : col_sizes_) n += v;
    return n;
}

bool WishartSpec::all_nonselfadjoint() const {
    for (const auto& e : hgrid_)
        if (e && names_[e->name].selfadjoint) return false;
    return true;
}

bool WishartSpec::equal_square_blocks() const {
    for (auto v : row_sizes_)
        if (v != row_sizes_[0]) return false;
    for (auto v : col_sizes_)
        if (v != row_sizes_[0]) return false;
    return true;
}

ModelSpec build_wishart_embedding(const WishartSpec& w) {
    const int r = w.rows();
    const int s = w.cols();
    const int d = r + s;

    std::vector<std::optional<BlockRef>> entries(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < s; ++j) {
            const auto& e = w.at(i, j);
            if (!e) continue;
            entries[i * d + (r + j)] = e;
            BlockRef adj = *e;
            if (!w.names()[e->name].selfadjoint) adj.adjoint = !adj.adjoint;
            entries[(r + j) * d + i] = adj;
        }

    BlockGrid grid(d, w.names(), std::move(entries));

    std::vector<std::int64_t> sizes;
    sizes.reserve(d);
    for (auto v : w.row_sizes()) sizes.push_back(v);
    for (auto v : w.col_sizes()) sizes.push_back(v);
    auto dims = DimensionProfile::rectangular(sizes);

    ModelSpec spec{derive_sigma(grid), dims, std::move(grid)};
    auto bad = validate_sigma(spec.cov, spec.dims);
    if (!bad.empty()) throw ValidationError("wishart embedding: " + bad.front().what);
    return spec;
}

}  // namespace blockspec
