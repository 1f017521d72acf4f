#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "sflat/flatness/analysis.hpp"
#include "sflat/symbolic/zero_test.hpp"

namespace sflat {

OutputJets::OutputJets(const SystemModel& sys, std::vector<Expr> phi, int depth)
    : sys_(sys),
      field_(extended_vector_field(sys, static_cast<unsigned>(depth < 0 ? 3 * sys.n() + 2 : depth))),
      jets_(phi.size()) {
    for (std::size_t j = 0; j < phi.size(); ++j) jets_[j].push_back(std::move(phi[j]));
}

const Expr& OutputJets::get(std::size_t j, int l) {
    auto& chain = jets_.at(j);
    while (static_cast<int>(chain.size()) <= l) chain.push_back(lie_scalar(field_, chain.back()));
    return chain[static_cast<std::size_t>(l)];
}

bool explicitly_depends(const Expr& e, Var v, bool* uncertain, const SampleOptions& opts) {
    if (!e.depends_on(v)) return false;
    TriState z = is_identically_zero(differentiate(e, v), opts);
    if (z.is_yes()) return false;
    if (z.is_inconclusive() && uncertain) *uncertain = true;
    return true;
}

namespace {

bool depends_on_any_input(const Expr& e, const SystemModel& sys, bool* uncertain, const SampleOptions& opts) {
    for (Var v : sys.input_vars())
        if (explicitly_depends(e, v, uncertain, opts)) return true;
    return false;
}

/// Jet differentials evaluated at a few random points. Rows are sparse
/// (Var -> value); exact arithmetic is used when nothing is transcendental.
class NumericJets {
public:
    NumericJets(OutputJets& jets, const SystemModel& sys, const SampleOptions& opts, int depth)
        : jets_(jets), opts_(opts) {
        for (Var v : sys.state_vars()) vars_.insert(v);
        for (const auto& u : sys.inputs)
            for (int a = 0; a <= depth; ++a) vars_.insert(u.jet(static_cast<unsigned>(a)).var());
        bool positive = false;
        for (std::size_t j = 0; j < 3; ++j) positive = positive || needs_positive_samples(jets.get(j, 0));
        for (const auto& f : sys.dynamics) positive = positive || needs_positive_samples(f);
        exact_ = !std::any_of(sys.dynamics.begin(), sys.dynamics.end(), [](const Expr& e) { return e.has_kernels(); });
        for (std::size_t j = 0; j < 3; ++j) exact_ = exact_ && !jets.get(j, 0).has_kernels();
        SampleOptions so = opts;
        so.seed = opts.seed * 7919 + 17;
        sampler_ = std::make_unique<Sampler>(so);
        positive_ = positive;
        for (int i = 0; i < 2; ++i) points_.push_back(sampler_->draw(vars_, positive_));
        rows_.resize(points_.size());
    }

    /// Generic rank of the jets up to `orders` (inclusive), optionally with
    /// unit rows for the given variables appended.
    int rank(const MultiIndex& orders, const std::vector<Var>& units) {
        int best = 0;
        for (std::size_t p = 0; p < points_.size(); ++p) {
            prepare(p, orders);
            std::vector<const Row*> rows;
            for (std::size_t j = 0; j < 3; ++j)
                for (int l = 0; l <= orders[j]; ++l) rows.push_back(&rows_[p].at({j, l}));
            std::vector<Row> unit_rows;
            unit_rows.reserve(units.size());
            for (Var v : units) {
                Row r;
                r.exact[v] = 1;
                r.approx[v] = 1.0;
                unit_rows.push_back(std::move(r));
            }
            for (const auto& r : unit_rows) rows.push_back(&r);
            best = std::max(best, exact_ ? rank_exact(rows) : rank_double(rows));
        }
        return best;
    }

private:
    struct Row {
        std::map<Var, Rational> exact;
        std::map<Var, double> approx;
    };

    /// Computes the row unless the point is a pole of some derivative.
    bool ensure(std::size_t p, std::size_t j, int l) {
        auto key = std::make_pair(j, l);
        if (rows_[p].count(key)) return true;
        const Expr& h = jets_.get(j, l);
        Row r;
        for (Var s : h.free_symbols()) {
            if (!vars_.count(s)) throw AnalysisError("jet of the flat output leaves the sampled coordinates");
            Expr d = differentiate(h, s);
            if (exact_) {
                auto v = evaluate_exact(d, points_[p]);
                if (!v) return false;
                if (*v != 0) r.exact[s] = *v;
            } else {
                auto v = evaluate(d, points_[p]);
                if (!v) return false;
                if (*v != 0.0) r.approx[s] = *v;
            }
        }
        rows_[p].emplace(key, std::move(r));
        return true;
    }

    void prepare(std::size_t p, const MultiIndex& orders) {
        for (int attempt = 0;; ++attempt) {
            bool ok = true;
            for (std::size_t j = 0; j < 3 && ok; ++j)
                for (int l = 0; l <= orders[j] && ok; ++l) ok = ensure(p, j, l);
            if (ok) return;
            if (attempt > 20) throw AnalysisError("no regular sample point for the flat-output jets");
            points_[p] = sampler_->draw(vars_, positive_);
            rows_[p].clear();
        }
    }

    static int rank_exact(const std::vector<const Row*>& rows) {
        std::vector<std::map<Var, Rational>> m;
        for (const Row* r : rows) m.push_back(r->exact);
        int rank = 0;
        std::vector<bool> used(m.size(), false);
        std::set<Var> cols;
        for (const auto& r : m)
            for (const auto& [v, _] : r) cols.insert(v);
        for (Var c : cols) {
            std::size_t piv = m.size();
            for (std::size_t i = 0; i < m.size(); ++i)
                if (!used[i] && m[i].count(c)) { piv = i; break; }
            if (piv == m.size()) continue;
            used[piv] = true;
            ++rank;
            const Rational pv = m[piv][c];
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (used[i] || !m[i].count(c)) continue;
                const Rational f = m[i][c] / pv;
                for (const auto& [v, x] : m[piv]) {
                    Rational nv = m[i][v] - f * x;
                    if (nv == 0) m[i].erase(v); else m[i][v] = nv;
                }
            }
        }
        return rank;
    }

    static int rank_double(const std::vector<const Row*>& rows) {
        std::set<Var> colset;
        for (const Row* r : rows)
            for (const auto& [v, _] : r->approx) colset.insert(v);
        std::vector<Var> cols(colset.begin(), colset.end());
        std::map<Var, std::size_t> idx;
        for (std::size_t i = 0; i < cols.size(); ++i) idx[cols[i]] = i;
        std::vector<std::vector<double>> a(rows.size(), std::vector<double>(cols.size(), 0.0));
        double scale = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const auto& [v, x] : rows[i]->approx) {
                a[i][idx[v]] = x;
                scale = std::max(scale, std::fabs(x));
            }
        const double tol = 1e-9 * std::max(scale, 1.0);
        int rank = 0;
        std::size_t r0 = 0;
        for (std::size_t c = 0; c < cols.size() && r0 < a.size(); ++c) {
            std::size_t piv = r0;
            for (std::size_t i = r0; i < a.size(); ++i)
                if (std::fabs(a[i][c]) > std::fabs(a[piv][c])) piv = i;
            if (std::fabs(a[piv][c]) <= tol) continue;
            std::swap(a[piv], a[r0]);
            for (std::size_t i = r0 + 1; i < a.size(); ++i) {
                const double f = a[i][c] / a[r0][c];
                for (std::size_t k = c; k < cols.size(); ++k) a[i][k] -= f * a[r0][k];
            }
            ++r0;
            ++rank;
        }
        return rank;
    }

    OutputJets& jets_;
    SampleOptions opts_;
    std::set<Var> vars_;
    bool exact_ = true;
    bool positive_ = false;
    std::unique_ptr<Sampler> sampler_;
    std::vector<Point> points_;
    std::vector<std::map<std::pair<std::size_t, int>, Row>> rows_;
};

}  // namespace

MultiIndex relative_degrees(const SystemModel& sys, const std::vector<Expr>& phi) {
    if (phi.size() != 3) throw AnalysisError("flat-output candidate must have three components");
    const int bound = static_cast<int>(2 * sys.n());
    OutputJets jets(sys, phi, 1);
    MultiIndex K;
    for (std::size_t j = 0; j < 3; ++j) {
        if (depends_on_any_input(phi[j], sys, nullptr, {}))
            throw AnalysisError("flat-output component " + std::to_string(j + 1) + " depends on inputs");
        int k = -1;
        for (int l = 1; l <= bound; ++l) {
            bool uncertain = false;
            if (depends_on_any_input(jets.get(j, l), sys, &uncertain, {})) {
                k = l;
                break;
            }
        }
        if (k < 0) throw AnalysisError("component never reaches inputs (component " + std::to_string(j + 1) + ")");
        K[j] = k;
    }
    return K;
}

MultiIndex determine_R(const SystemModel& sys, const std::vector<Expr>& phi, const MultiIndex& K,
                       const SampleOptions& opts) {
    const int n = static_cast<int>(sys.n());
    const int budget = std::max(0, 3 * n - K.sum());
    OutputJets jets(sys, phi, K.max() + budget + 2);
    NumericJets num(jets, sys, opts, K.max() + budget + 2);
    const std::vector<Var> xs = sys.state_vars();
    std::vector<Var> xus = xs;
    for (Var u : sys.input_vars()) xus.push_back(u);

    auto valid = [&](const MultiIndex& R) {
        const int below = num.rank(R - 1, {});
        if (num.rank(R - 1, xs) != below) return false;
        const int at = num.rank(R, {});
        return num.rank(R, xus) == at;
    };

    // Both containments are monotone in R, so the first uniform saturation
    // dominates the minimal index and componentwise decrements reach it.
    std::optional<MultiIndex> R;
    for (int d = 0; d <= budget; ++d) {
        if (valid(K + d)) {
            R = K + d;
            break;
        }
    }
    if (!R) throw StructureError("candidate is not a flat output at this order bound");
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t j = 0; j < 3; ++j) {
            while ((*R)[j] > K[j]) {
                MultiIndex lower = *R;
                lower[j] -= 1;
                if (!valid(lower)) break;
                *R = lower;
                changed = true;
            }
        }
    }
    if (R->sum() > 3 * n) throw StructureError("candidate is not a flat output at this order bound");
    return *R;
}

int differential_difference(const MultiIndex& R, int n) {
    const int d = R.sum() - n;
    if (d < 0) throw AnalysisError("sum of R is smaller than the state dimension; candidate inconsistent");
    return d;
}

MultiIndex permute(const MultiIndex& m, const std::array<int, 3>& order) {
    return {m[static_cast<std::size_t>(order[0])], m[static_cast<std::size_t>(order[1])],
            m[static_cast<std::size_t>(order[2])]};
}

std::array<int, 3> rearrange_components(const MultiIndex& K, const MultiIndex& R) {
    const MultiIndex d = R - K;
    std::array<int, 3> order{0, 1, 2};
    do {
        const MultiIndex p = permute(d, order);
        if (p[0] == p[2] && p[2] >= p[1]) return order;
    } while (std::next_permutation(order.begin(), order.end()));
    throw StructureError("derivative-order pattern violates the three-input structure: R - K = " + d.to_string());
}

}  // namespace sflat
