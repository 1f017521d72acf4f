#include "sflat/geometry/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sflat {

ExtendedSpace::ExtendedSpace(std::vector<Symbol> states, std::vector<Symbol> inputs, unsigned jet_depth)
    : states_(std::move(states)), inputs_(std::move(inputs)), depth_(jet_depth) {
    for (const auto& s : states_) coords_.push_back(s.var());
    for (const auto& u : inputs_)
        for (unsigned a = 0; a <= depth_; ++a) coords_.push_back(u.jet(a).var());
    for (std::size_t i = 0; i < coords_.size(); ++i)
        if (!index_.emplace(coords_[i], i).second)
            throw std::invalid_argument("coordinate " + var_name(coords_[i]) + " appears twice");
}

long ExtendedSpace::index_of(Var v) const {
    auto it = index_.find(v);
    return it == index_.end() ? -1 : static_cast<long>(it->second);
}

std::vector<std::size_t> ExtendedSpace::state_indices() const {
    std::vector<std::size_t> out(states_.size());
    std::iota(out.begin(), out.end(), 0);
    return out;
}

std::vector<std::size_t> ExtendedSpace::jet_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = states_.size(); i < coords_.size(); ++i) out.push_back(i);
    return out;
}

VectorField extended_vector_field(const SystemModel& sys, unsigned jet_depth) {
    VectorField v;
    auto space = std::make_shared<const ExtendedSpace>(sys.states, sys.inputs, jet_depth);
    v.coeffs = sys.dynamics;
    for (const auto& u : sys.inputs)
        for (unsigned a = 0; a <= jet_depth; ++a) v.coeffs.push_back(a < jet_depth ? Expr(u.jet(a + 1)) : Expr(0));
    v.space = std::move(space);
    return v;
}

Expr lie_scalar(const VectorField& v, const Expr& h) {
    Expr out(0);
    for (Var s : h.free_symbols()) {
        long i = v.space->index_of(s);
        if (i < 0) continue;
        const Expr& c = v.coeffs[static_cast<std::size_t>(i)];
        if (c.is_zero()) continue;
        out += c * differentiate(h, s);
    }
    return out;
}

bool OneForm::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](const Expr& e) { return e.is_zero(); });
}

OneForm differential(const Expr& h, const ExtendedSpace& space) {
    OneForm w;
    w.coeffs.assign(space.dim(), Expr(0));
    for (Var s : h.free_symbols()) {
        long i = space.index_of(s);
        if (i >= 0) w.coeffs[static_cast<std::size_t>(i)] = differentiate(h, s);
    }
    return w;
}

Expr TwoForm::at(std::size_t i, std::size_t j) const {
    if (i == j) return Expr(0);
    if (i > j) return -at(j, i);
    auto it = coeffs.find({i, j});
    return it == coeffs.end() ? Expr(0) : it->second;
}

TwoForm exterior_derivative(const OneForm& w, const ExtendedSpace& space) {
    TwoForm out;
    out.dim = space.dim();
    // d_i w_j is nonzero only when w_j depends on coordinate i.
    std::map<std::pair<std::size_t, std::size_t>, Expr> partial;  // (i, j) -> d_i w_j
    for (std::size_t j = 0; j < w.coeffs.size(); ++j) {
        for (Var s : w.coeffs[j].free_symbols()) {
            long i = space.index_of(s);
            if (i < 0) continue;
            Expr d = differentiate(w.coeffs[j], s);
            if (!d.is_zero()) partial[{static_cast<std::size_t>(i), j}] = d;
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> keys;
    for (const auto& [k, _] : partial) {
        if (k.first == k.second) continue;
        keys.insert({std::min(k.first, k.second), std::max(k.first, k.second)});
    }
    for (const auto& [i, j] : keys) {
        Expr c(0);
        if (auto it = partial.find({i, j}); it != partial.end()) c += it->second;
        if (auto it = partial.find({j, i}); it != partial.end()) c -= it->second;
        if (!c.is_zero()) out.coeffs[{i, j}] = c;
    }
    return out;
}

// ------------------------------------------------------------ codistributions

Codistribution Codistribution::span(std::shared_ptr<const ExtendedSpace> space, const ExprMatrix& rows,
                                    const SampleOptions& opts) {
    Codistribution d;
    const std::size_t dim = space->dim();
    d.space_ = std::move(space);
    if (rows.rows() == 0) {
        d.basis_ = ExprMatrix(0, dim);
        return d;
    }
    if (rows.cols() != dim) throw std::invalid_argument("one-form length does not match the space dimension");
    RankResult r = sampled_rank(rows, opts);
    std::vector<std::size_t> keep = r.pivot_rows;
    std::sort(keep.begin(), keep.end());
    d.basis_ = rows.select_rows(keep);
    d.certificate_ = std::move(r.certificate);
    return d;
}

Codistribution Codistribution::span(std::shared_ptr<const ExtendedSpace> space, const std::vector<OneForm>& forms,
                                    const SampleOptions& opts) {
    const std::size_t dim = space->dim();
    ExprMatrix rows(0, dim);
    for (const auto& f : forms) rows.append_row(f.coeffs);
    return span(std::move(space), rows, opts);
}

Codistribution Codistribution::of_differentials(std::shared_ptr<const ExtendedSpace> space,
                                                const std::vector<Expr>& fns, const SampleOptions& opts) {
    std::vector<OneForm> forms;
    for (const auto& h : fns) forms.push_back(differential(h, *space));
    return span(std::move(space), forms, opts);
}

bool Codistribution::within_state_span() const {
    for (std::size_t j : space_->jet_indices())
        for (std::size_t i = 0; i < basis_.rows(); ++i)
            if (!basis_(i, j).is_zero()) return false;
    return true;
}

bool extends(const Codistribution& d, const ExprMatrix& extra, const SampleOptions& opts) {
    if (extra.rows() == 0) return false;
    return sampled_rank(d.basis().stacked(extra), opts).rank > d.rank();
}

bool contains(const Codistribution& outer, const Codistribution& inner, const SampleOptions& opts) {
    return !extends(outer, inner.basis(), opts);
}

std::size_t corank(const Codistribution& inner, const Codistribution& outer, const SampleOptions& opts) {
    const ExprMatrix& in = inner.basis();
    if (extends(outer, in, opts)) {
        for (std::size_t i = 0; i < in.rows(); ++i) {
            if (extends(outer, in.select_rows({i}), opts)) {
                std::string w;
                const auto& space = *inner.space();
                for (std::size_t j = 0; j < in.cols(); ++j) {
                    if (in(i, j).is_zero()) continue;
                    w += (w.empty() ? "" : " + ") + ("(" + in(i, j).to_string() + ")*d" + var_name(space.coord(j)));
                }
                throw ContainmentError("codistribution not contained in its successor; witness " + w);
            }
        }
        throw ContainmentError("codistribution not contained in its successor");
    }
    return outer.rank() - inner.rank();
}

Codistribution intersect_with_state_span(const Codistribution& p, const SampleOptions& opts) {
    const auto& space = *p.space();
    if (p.within_state_span()) return p;
    Rref r = rref(p.basis(), space.jet_indices());
    ExprMatrix state_rows(0, space.dim());
    for (std::size_t i = r.rank(); i < r.reduced.rows(); ++i)
        if (!r.reduced.row_is_zero(i)) state_rows.append_row(r.reduced.row(i));
    return Codistribution::span(p.space(), state_rows, opts);
}

// ------------------------------------------------------------ Frobenius

namespace {

/// X(h) = sum_i X_i d_i h over the space coordinates.
Expr apply_vector(const std::map<std::size_t, Expr>& x, const Expr& h, const ExtendedSpace& space) {
    Expr out(0);
    for (Var s : h.free_symbols()) {
        long i = space.index_of(s);
        if (i < 0) continue;
        auto it = x.find(static_cast<std::size_t>(i));
        if (it == x.end()) continue;
        out += it->second * differentiate(h, s);
    }
    return out;
}

/// Full coordinate point where |c| exceeds the zero tolerance.
Point witness_point(const Expr& c, const Codistribution& d, const SampleOptions& opts) {
    std::set<Var> vars(d.space()->coords().begin(), d.space()->coords().end());
    for (Var v : d.basis().free_symbols()) vars.insert(v);
    Sampler sampler(opts);
    Point p;
    for (int t = 0; t < std::max(opts.samples, 1); ++t) {
        p = sampler.draw(vars, needs_positive_samples(c));
        auto v = evaluate(c, p);
        if (v && std::fabs(*v) > kZeroTolerance) return p;
    }
    return p;
}

}  // namespace

FrobeniusResult frobenius_integrable(const Codistribution& d, const SampleOptions& opts) {
    FrobeniusResult res;
    if (d.rank() == 0) {
        res.verdict = TriState::yes("empty codistribution");
        return res;
    }
    const auto& space = *d.space();
    Rref r = rref(d.basis());
    const std::size_t k = r.rank();
    std::vector<std::vector<Expr>> rows;
    for (std::size_t a = 0; a < k; ++a) rows.push_back(r.reduced.row(a));
    std::set<std::size_t> pivots(r.pivot_cols.begin(), r.pivot_cols.end());

    // Directions outside the support whose coordinates no coefficient depends on
    // contribute nothing, so only the relevant free columns are examined.
    std::set<std::size_t> relevant;
    for (const auto& row : rows)
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j].is_zero()) continue;
            if (!pivots.count(j)) relevant.insert(j);
            for (Var s : row[j].free_symbols()) {
                long i = space.index_of(s);
                if (i >= 0 && !pivots.count(static_cast<std::size_t>(i))) relevant.insert(static_cast<std::size_t>(i));
            }
        }
    std::vector<std::size_t> free_cols(relevant.begin(), relevant.end());

    // v_f = e_f - sum_a w^a_f e_{p_a} annihilates every reduced form.
    std::vector<std::map<std::size_t, Expr>> vecs;
    for (std::size_t f : free_cols) {
        std::map<std::size_t, Expr> v;
        v[f] = Expr(1);
        for (std::size_t a = 0; a < k; ++a)
            if (!rows[a][f].is_zero()) v[r.pivot_cols[a]] = -rows[a][f];
        vecs.push_back(std::move(v));
    }
    // X(w_j) for every needed pair; dw(X, Y) = sum_j X(w_j) Y_j - Y(w_j) X_j.
    TriState verdict = TriState::yes("all wedge coefficients vanish");
    for (std::size_t a = 0; a < k; ++a) {
        const auto& w = rows[a];
        std::vector<std::vector<Expr>> xw(vecs.size());
        for (std::size_t f = 0; f < vecs.size(); ++f) {
            xw[f].assign(w.size(), Expr(0));
            for (std::size_t j = 0; j < w.size(); ++j)
                if (!w[j].is_constant()) xw[f][j] = apply_vector(vecs[f], w[j], space);
        }
        for (std::size_t f = 0; f < vecs.size(); ++f)
            for (std::size_t g = f + 1; g < vecs.size(); ++g) {
                Expr c(0);
                for (const auto& [j, yj] : vecs[g])
                    if (!xw[f][j].is_zero()) c += xw[f][j] * yj;
                for (const auto& [j, xj] : vecs[f])
                    if (!xw[g][j].is_zero()) c -= xw[g][j] * xj;
                if (c.is_zero()) continue;
                TriState t = is_identically_zero(c, opts);
                if (t.is_yes()) continue;
                if (t.is_no()) {
                    if (t.certificate.empty()) t.certificate = witness_point(c, d, opts).describe();
                    res.verdict = TriState::no("d(w" + std::to_string(a + 1) + ") does not vanish on the annihilator (" +
                                                   var_name(space.coord(free_cols[f])) + ", " +
                                                   var_name(space.coord(free_cols[g])) + ")",
                                               t.certificate);
                    res.witness = c;
                    return res;
                }
                if (verdict.is_yes()) {
                    verdict = TriState::inconclusive("coefficient " + c.to_string() + ": " + t.reason);
                    res.witness = c;
                }
            }
    }
    res.verdict = verdict;
    return res;
}

}  // namespace sflat
