#include <algorithm>
#include <set>

#include "sflat/flatness/analysis.hpp"
#include "sflat/symbolic/linalg.hpp"

namespace sflat {

namespace {

std::string fresh_input_name(const SystemModel& sys, const std::string& base) {
    std::set<std::string> taken;
    for (const auto& s : sys.states) taken.insert(s.base);
    for (const auto& s : sys.inputs) taken.insert(s.base);
    std::string name = base;
    while (taken.count(name)) name += "h";
    return name;
}

/// Some jet of `u` up to `max_order` appears explicitly in `e`.
bool depends_on_input(const Expr& e, const Symbol& u, int max_order, std::string* taint, const SampleOptions& opts) {
    for (int a = 0; a <= max_order; ++a) {
        bool uncertain = false;
        const Symbol ua = u.jet(static_cast<unsigned>(a));
        if (explicitly_depends(e, ua.var(), &uncertain, opts)) {
            if (uncertain && taint) {
                if (!taint->empty()) *taint += "; ";
                *taint += "dependence on " + ua.name() + " is not certified";
            }
            return true;
        }
    }
    return false;
}

/// First order l in [K^j, R^j] at which component j depends on u, or -1.
int first_dependence(OutputJets& jets, std::size_t j, const MultiIndex& K, const MultiIndex& R, const Symbol& u,
                     std::string* taint, const SampleOptions& opts) {
    for (int l = K[j]; l <= R[j]; ++l)
        if (depends_on_input(jets.get(j, l), u, l, taint, opts)) return l;
    return -1;
}

struct Indices {
    int p2 = -1, p3 = -1, s = -1;
};

/// p2, p3 and s for a fixed labelling of the second and third inputs.
Indices locate(OutputJets& jets, const MultiIndex& K, const MultiIndex& R, const Symbol& u2, const Symbol& u3,
               std::string* taint, const SampleOptions& opts) {
    Indices ix;
    ix.p2 = first_dependence(jets, 1, K, R, u2, taint, opts);
    if (ix.p2 < 0) throw StructureError("second flat-output component never depends on " + u2.name());
    // Before p3 neither remaining input may appear, so the first order that
    // involves either one is p3 (this also covers p3 = r3 when u2 never does).
    const int via2 = first_dependence(jets, 2, K, R, u2, taint, opts);
    const int via3 = first_dependence(jets, 2, K, R, u3, taint, opts);
    ix.p3 = via2 < 0 ? via3 : (via3 < 0 ? via2 : std::min(via2, via3));
    if (ix.p3 < 0) throw StructureError("third flat-output component never depends on the remaining inputs");
    MultiIndex P(K[0] + ix.p3 - K[2], ix.p2, ix.p3);
    ix.s = detect_s(jets, P, R, u3, taint, opts);
    if (ix.s < 0) throw StructureError("derivative structure violated: input " + u3.name() + " never appears up to R");
    return ix;
}

}  // namespace

InputReplacement replace_input(const SystemModel& sys, const Expr& definition, const Symbol& new_input,
                               const std::vector<std::size_t>& candidates, std::size_t position,
                               const SampleOptions& opts) {
    bool inconclusive = false;
    bool unsolvable = false;
    for (std::size_t c : candidates) {
        const Symbol& u = sys.inputs.at(c);
        if (!definition.depends_on(u.var())) continue;
        TriState z = is_identically_zero(differentiate(definition, u.var()), opts);
        if (z.is_yes()) continue;
        if (z.is_inconclusive()) {
            inconclusive = true;
            continue;
        }
        Solution sol;
        try {
            sol = solve_for({definition - Expr(new_input)}, {u.var()});
        } catch (const SolveError&) {
            unsolvable = true;
            continue;
        }
        InputReplacement out;
        out.new_input = new_input;
        out.replaced = c;
        out.replaced_symbol = u;
        out.definition = definition;
        out.inverse = sol.values.at(u.var());
        out.guards = sol.guards;
        out.certificate = z.certificate;
        Bindings b{{u.var(), out.inverse}};
        out.system.states = sys.states;
        for (const auto& f : sys.dynamics) out.system.dynamics.push_back(substitute(f, b));
        out.system.inputs = sys.inputs;
        out.system.inputs.erase(out.system.inputs.begin() + static_cast<long>(c));
        out.system.inputs.insert(out.system.inputs.begin() + static_cast<long>(std::min(position, out.system.inputs.size())),
                                 new_input);
        out.system.affine = affine_decomposition(out.system);
        return out;
    }
    if (unsolvable)
        throw AnalysisError("input transformation " + new_input.name() + " = " + definition.to_string() +
                            " is not solvable in closed form");
    if (inconclusive)
        throw InconclusiveError("no input coefficient of " + definition.to_string() + " is certified nonzero");
    throw AnalysisError(definition.to_string() + " does not depend on any admissible input");
}

InputReplacement normalize_u1(const SystemModel& sys, const std::vector<Expr>& phi, const MultiIndex& K,
                              const SampleOptions& opts) {
    OutputJets jets(sys, phi, 1);
    std::vector<std::size_t> all(sys.m());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Symbol uh(fresh_input_name(sys, "uh1"), SymbolKind::Input);
    return replace_input(sys, jets.get(0, K[0]), uh, all, 0, opts);
}

int detect_s(OutputJets& jets, const MultiIndex& P, const MultiIndex& R, const Symbol& u3, std::string* taint,
             const SampleOptions& opts) {
    for (int sigma = 0; P[1] + sigma <= R[1] || P[2] + sigma <= R[2]; ++sigma) {
        for (std::size_t j = 1; j < 3; ++j) {
            const int l = P[j] + sigma;
            if (l > R[j]) continue;
            if (depends_on_input(jets.get(j, l), u3, l, taint, opts)) return sigma;
        }
    }
    return -1;
}

DerivativeStructure derivative_structure(const InputReplacement& norm, const std::vector<Expr>& phi,
                                         const MultiIndex& K, const MultiIndex& R, const SampleOptions& opts) {
    const SystemModel& sys = norm.system;
    if (sys.m() != 3) throw AnalysisError("derivative structure needs exactly three inputs");
    DerivativeStructure ds;
    ds.K = K;
    ds.R = R;
    ds.u1_hat = norm.new_input;
    ds.u1_hat_definition = norm.definition;
    ds.replaced_input = norm.replaced;

    OutputJets jets(sys, phi, R.max() + 2);
    for (std::size_t j = 0; j < 3; ++j)
        for (int l = 0; l <= R[j]; ++l) ds.jets[j].push_back(jets.get(j, l));

    // u^2 is the lowest-index remaining input that shows up first in the
    // second component; the other one plays u^3.
    int first = -1;
    for (int l = K[1]; l <= R[1] && first < 0; ++l)
        for (std::size_t i = 1; i < 3; ++i)
            if (depends_on_input(ds.jets[1][static_cast<std::size_t>(l)], sys.inputs[i], l, &ds.taint, opts)) {
                first = static_cast<int>(i);
                break;
            }
    if (first < 0) throw StructureError("second flat-output component never depends on the remaining inputs");
    ds.u2_index = static_cast<std::size_t>(first);
    ds.u3_index = 3 - ds.u2_index;

    Indices ix = locate(jets, K, R, sys.inputs[ds.u2_index], sys.inputs[ds.u3_index], &ds.taint, opts);
    ds.p2 = ix.p2;
    ds.p3 = ix.p3;
    ds.s = ix.s;
    ds.d_max = R[0] - K[0];
    ds.d_min = R[1] - K[1];
    ds.delta = ds.d_max - ds.d_min;
    ds.P = MultiIndex(K[0] + ds.p3 - K[2], ds.p2, ds.p3);
    const int rp2 = R[1] - ds.p2;
    const int rp3 = R[2] - ds.p3;
    if (rp2 != rp3)
        throw StructureError("derivative structure violated: r2 - p2 = " + std::to_string(rp2) + " but r3 - p3 = " +
                             std::to_string(rp3));
    ds.d_rp = rp2;
    if (ds.p3 - K[2] < ds.p2 - K[1])
        throw StructureError("derivative structure violated: p3 - k3 = " + std::to_string(ds.p3 - K[2]) + " < p2 - k2 = " +
                             std::to_string(ds.p2 - K[1]));
    if ((ds.p3 - K[2]) - (ds.p2 - K[1]) != ds.delta)
        throw StructureError("derivative structure violated: (p3 - k3) - (p2 - k2) differs from delta = " +
                             std::to_string(ds.delta));
    return ds;
}

std::vector<IdentityCheck> structure_identities(const DerivativeStructure& ds, int n) {
    std::vector<IdentityCheck> out;
    IdentityCheck dim{"n = k1 + p2 + r3", n, ds.K[0] + ds.p2 + ds.R[2], false};
    dim.pass = dim.lhs == dim.rhs;
    out.push_back(dim);
    IdentityCheck dd{"d_diff = d_max + d_rp", ds.R.sum() - n, ds.d_max + ds.d_rp, false};
    dd.pass = dd.lhs == dd.rhs;
    out.push_back(dd);
    return out;
}

MinimalSflResult minimal_sfl_check(const DerivativeStructure& ds, const InputReplacement& norm,
                                   const std::vector<Expr>& phi, const std::optional<Expr>& hint,
                                   const SampleOptions& opts) {
    MinimalSflResult res;
    res.s = ds.s;
    const SystemModel& sys = norm.system;

    ExprMatrix du(3, sys.m());
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < sys.m(); ++i)
            du(j, i) = differentiate(ds.jets[j][static_cast<std::size_t>(ds.K[j])], sys.inputs[i].var());
    std::size_t rank = 0;
    try {
        rank = generic_rank(du, opts).rank;
    } catch (const RankError& e) {
        res.verdict = TriState::inconclusive(std::string("rank of the input Jacobian undecided: ") + e.what());
        return res;
    }

    std::optional<Expr> transform;
    if (rank == 2) {
        transform = ds.jets[1][static_cast<std::size_t>(ds.K[1])];
    } else if (hint) {
        transform = substitute(*hint, {{norm.replaced_symbol.var(), norm.inverse}});
    } else {
        if (ds.s == ds.d_rp)
            res.verdict = TriState::yes("s = d_rp without further input transformation");
        else
            res.verdict = TriState::inconclusive("s = " + std::to_string(ds.s) + " < d_rp = " +
                                                 std::to_string(ds.d_rp) +
                                                 "; a transformation for the second input must be supplied as a hint");
        return res;
    }

    Symbol uh2(fresh_input_name(sys, "uh2"), SymbolKind::Input);
    InputReplacement second;
    try {
        second = replace_input(sys, *transform, uh2, {1, 2}, 1, opts);
    } catch (const InconclusiveError& e) {
        res.verdict = TriState::inconclusive(e.what());
        return res;
    } catch (const AnalysisError& e) {
        throw AnalysisError(std::string("second input transformation is not invertible jointly with the first: ") +
                            e.what());
    }
    res.phi_u2 = *transform;
    OutputJets jets(second.system, phi, ds.R.max() + 2);
    std::string taint;
    Indices ix = locate(jets, ds.K, ds.R, second.system.inputs[1], second.system.inputs[2], &taint, opts);
    res.s = ix.s;
    const int d_rp = ds.R[1] - ix.p2;
    if (ix.s == d_rp)
        res.verdict = TriState::yes("s = d_rp = " + std::to_string(d_rp) + " with u2 replaced by " +
                                    transform->to_string());
    else
        res.verdict = TriState::inconclusive("transformation " + transform->to_string() + " gives s = " +
                                             std::to_string(ix.s) + ", d_rp = " + std::to_string(d_rp));
    if (!taint.empty() && res.verdict.is_yes()) res.verdict = TriState::inconclusive(taint);
    return res;
}

}  // namespace sflat
