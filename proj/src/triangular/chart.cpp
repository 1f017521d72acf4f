#include <algorithm>
#include <set>

#include "sflat/triangular/triangular.hpp"

namespace sflat {

std::vector<Symbol> CoordinateChart::z_symbols() const {
    std::vector<Symbol> out;
    for (const auto& c : chains)
        for (const auto& e : c) out.push_back(e.z);
    return out;
}

std::vector<Expr> CoordinateChart::functions() const {
    std::vector<Expr> out;
    for (const auto& c : chains)
        for (const auto& e : c) out.push_back(e.fn);
    return out;
}

namespace {

struct Candidate {
    Expr fn;
    std::string origin;
};

std::string z_base(const SystemModel& sys) {
    std::set<std::string> taken;
    for (const auto& s : sys.states) taken.insert(s.base);
    for (const auto& s : sys.inputs) taken.insert(s.base);
    std::string b = "z";
    auto clash = [&](const std::string& base) {
        for (const auto& t : taken)
            if (t.rfind(base, 0) == 0) return true;
        return false;
    };
    while (clash(b)) b += "z";
    return b;
}

class Pool {
public:
    Pool(const SystemModel& sys, const std::vector<NamedExpr>& hints, std::vector<Candidate> phi_jets) {
        for (const auto& h : hints) items_.push_back({h.value, "hint:" + h.name});
        for (const auto& x : sys.states) base_.push_back(Expr(x));
        // Latest-declared coordinates first: they tend to sit deeper in the chains.
        for (auto it = base_.rbegin(); it != base_.rend(); ++it) items_.push_back({*it, "state"});
        for (auto& c : phi_jets) items_.push_back(std::move(c));
    }

    std::size_t size() const { return items_.size(); }
    const Candidate& operator[](std::size_t i) const { return items_[i]; }

    /// Appends pairwise products and sums once the singletons are used up.
    bool grow() {
        if (grown_) return false;
        grown_ = true;
        for (std::size_t a = 0; a < base_.size(); ++a)
            for (std::size_t b = a; b < base_.size(); ++b) items_.push_back({base_[a] * base_[b], "product"});
        for (std::size_t a = 0; a < base_.size(); ++a)
            for (std::size_t b = a + 1; b < base_.size(); ++b) {
                items_.push_back({base_[a] + base_[b], "sum"});
                items_.push_back({base_[a] - base_[b], "sum"});
            }
        return true;
    }

private:
    std::vector<Expr> base_;
    std::vector<Candidate> items_;
    bool grown_ = false;
};

ExprMatrix row_of(const Expr& h, const ExtendedSpace& space) {
    ExprMatrix m(0, space.dim());
    m.append_row(differential(h, space).coeffs);
    return m;
}

/// Derivative of a state function along the dynamics.
Expr along(const SystemModel& sys, const Expr& h) {
    Expr out(0);
    for (std::size_t k = 0; k < sys.n(); ++k) {
        const Var x = sys.states[k].var();
        if (h.depends_on(x)) out += differentiate(h, x) * sys.dynamics[k];
    }
    return out;
}

}  // namespace

CoordinateChart extract_coordinates(const SystemModel& sys, const std::vector<Expr>& phi,
                                    const DerivativeStructure& ds, const QSequence& seq,
                                    const std::vector<NamedExpr>& hints, const SampleOptions& opts) {
    if (seq.levels.empty()) throw TriangularError("empty Q sequence");
    if (static_cast<int>(seq.levels.size()) != ds.d_max + 1)
        throw TriangularError("Q sequence length does not match d_max + 1");
    const auto space = seq.levels.front().Q.space();
    const int k1 = ds.K[0], k2 = ds.K[1], k3 = ds.K[2];

    CoordinateChart chart;
    chart.source_states = sys.states;
    OutputJets jets(sys, phi, 1);
    const std::string zb = z_base(sys);
    auto add = [&](int chain, const Expr& fn, const std::string& origin) {
        auto& c = chart.chains[static_cast<std::size_t>(chain - 1)];
        Symbol z(zb + std::to_string(chain) + "_" + std::to_string(c.size() + 1), SymbolKind::State);
        c.push_back({z, fn, origin});
    };
    const int kk[3] = {k1, k2, k3};
    for (int j = 0; j < 3; ++j)
        for (int l = 0; l < kk[j]; ++l)
            add(j + 1, jets.get(static_cast<std::size_t>(j), l),
                "phi^" + std::to_string(j + 1) + "_[" + std::to_string(l) + "]");

    // Output jets that happen to be state functions can also serve as generators.
    std::vector<Candidate> phi_pool;
    for (int j = 0; j < 3; ++j)
        for (int l = kk[j]; l <= ds.R[static_cast<std::size_t>(j)]; ++l) {
            const Expr& e = jets.get(static_cast<std::size_t>(j), l);
            bool state_only = true;
            for (const auto& u : sys.inputs)
                for (unsigned a = 0; a <= static_cast<unsigned>(l) && state_only; ++a)
                    state_only = !e.depends_on(u.jet(a).var());
            if (state_only)
                phi_pool.push_back({e, "phi^" + std::to_string(j + 1) + "_[" + std::to_string(l) + "]"});
        }
    Pool pool(sys, hints, std::move(phi_pool));

    InputReplacement norm =
        replace_input(sys, ds.u1_hat_definition, ds.u1_hat, {ds.replaced_input}, 0, opts);

    for (int i = 1; i <= ds.d_max; ++i) {
        const QLevel& lv = seq.levels[static_cast<std::size_t>(i)];
        ExprMatrix acc = seq.levels[static_cast<std::size_t>(i - 1)].Q.basis();
        std::size_t acc_rank = acc.rows();
        const std::size_t target = lv.Q.rank();
        std::vector<Candidate> found;
        std::size_t next = 0;
        while (acc_rank < target) {
            if (next >= pool.size()) {
                if (pool.grow()) continue;
                throw TriangularError("no generator found for Q_A(" + std::to_string(i) + ") = Q" + lv.A.to_string() +
                                      "; residual corank " + std::to_string(target - acc_rank) +
                                      " (supply hints)");
            }
            const Candidate& c = pool[next++];
            ExprMatrix d = row_of(c.fn, *space);
            if (d.row_is_zero(0)) continue;
            if (extends(lv.Q, d, opts)) continue;
            ExprMatrix trial = acc.stacked(d);
            const std::size_t r = sampled_rank(trial, opts).rank;
            if (r <= acc_rank) continue;
            acc = std::move(trial);
            acc_rank = r;
            found.push_back(c);
        }

        const bool coupled = i > ds.delta && i <= ds.p3 - k3;
        if (!coupled) {
            for (const auto& c : found) add(3, c.fn, c.origin);
            continue;
        }
        if (found.size() != 2)
            throw TriangularError("level " + std::to_string(i) + " should add two generators, found " +
                                  std::to_string(found.size()));
        if (i == ds.p3 - k3) {
            // The z2 chain ends where a remaining input shows up in the derivative.
            auto hits = [&](const Candidate& c) {
                const Expr d = along(norm.system, c.fn);
                return explicitly_depends(d, norm.system.inputs[ds.u2_index].var(), nullptr, opts) ||
                       explicitly_depends(d, norm.system.inputs[ds.u3_index].var(), nullptr, opts);
            };
            if (!hits(found[0]) && hits(found[1])) std::swap(found[0], found[1]);
        }
        add(2, found[0].fn, found[0].origin);
        add(3, found[1].fn, found[1].origin);
    }

    if (static_cast<int>(chart.chains[1].size()) != ds.p2 || static_cast<int>(chart.chains[2].size()) != ds.R[2] ||
        static_cast<int>(chart.chains[0].size()) != k1)
        throw TriangularError("chart chains have lengths (" + std::to_string(chart.chains[0].size()) + "," +
                              std::to_string(chart.chains[1].size()) + "," + std::to_string(chart.chains[2].size()) +
                              "), expected (" + std::to_string(k1) + "," + std::to_string(ds.p2) + "," +
                              std::to_string(ds.R[2]) + ")");
    const std::size_t n = sys.n();
    if (chart.size() != n)
        throw TriangularError("chart has " + std::to_string(chart.size()) + " functions for " + std::to_string(n) +
                              " states");

    const auto fns = chart.functions();
    ExprMatrix jac(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) jac(r, c) = differentiate(fns[r], sys.states[c].var());
    try {
        chart.jacobian = generic_rank(jac, opts);
    } catch (const RankError& e) {
        throw TriangularError(std::string("chart Jacobian rank not certified: ") + e.what());
    }
    if (chart.jacobian.rank != n) throw TriangularError("chart Jacobian is singular");
    SampleOptions vo = opts;
    vo.seed = opts.seed + 7919;
    vo.fixed = nullptr;
    Sampler sampler(vo);
    const auto vars = jac.free_symbols();
    for (int t = 0; t < 20 && chart.verified_points < 5; ++t) {
        auto r = rank_at(jac, sampler.draw(vars));
        if (r && *r == n) ++chart.verified_points;
    }

    std::vector<Expr> eqs;
    std::vector<Var> unknowns;
    const auto zs = chart.z_symbols();
    for (std::size_t r = 0; r < n; ++r) {
        eqs.push_back(Expr(zs[r]) - fns[r]);
        unknowns.push_back(sys.states[r].var());
    }
    try {
        Solution sol = solve_for(eqs, unknowns);
        chart.inverse = sol.values;
        chart.inverse_guards = sol.guards;
    } catch (const SolveError&) {
        chart.inverse.reset();
    }
    return chart;
}

CoordinateChart identity_chart(const SystemModel& sys, const std::array<int, 3>& dims) {
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1 || static_cast<std::size_t>(dims[0] + dims[1] + dims[2]) != sys.n())
        throw TriangularError("chain lengths do not add up to the state dimension");
    CoordinateChart chart;
    chart.source_states = sys.states;
    const std::string zb = z_base(sys);
    Bindings inv;
    std::size_t k = 0;
    for (int c = 1; c <= 3; ++c)
        for (int i = 1; i <= dims[static_cast<std::size_t>(c - 1)]; ++i, ++k) {
            Symbol z(zb + std::to_string(c) + "_" + std::to_string(i), SymbolKind::State);
            chart.chains[static_cast<std::size_t>(c - 1)].push_back({z, Expr(sys.states[k]), "state"});
            inv[sys.states[k].var()] = Expr(z);
        }
    chart.inverse = std::move(inv);
    chart.jacobian.rank = sys.n();
    for (std::size_t r = 0; r < sys.n(); ++r) {
        chart.jacobian.pivot_rows.push_back(r);
        chart.jacobian.pivot_cols.push_back(r);
    }
    // The Jacobian is the identity, so every point verifies.
    chart.verified_points = 5;
    return chart;
}

}  // namespace sflat
