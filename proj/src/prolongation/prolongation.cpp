#include "sflat/prolongation/prolongation.hpp"

#include <algorithm>
#include <stdexcept>

namespace sflat {

SystemModel prolong(const SystemModel& sys, const std::vector<int>& D) {
    if (D.size() != sys.m()) throw std::invalid_argument("prolongation orders must match the number of inputs");
    SystemModel out;
    out.states = sys.states;
    out.dynamics = sys.dynamics;
    for (std::size_t j = 0; j < sys.m(); ++j) {
        const Symbol& u = sys.inputs[j];
        if (D[j] < 0) throw std::invalid_argument("prolongation orders must be nonnegative");
        for (int a = 0; a < D[j]; ++a) {
            out.states.emplace_back(u.base, SymbolKind::State, u.jet_order + static_cast<unsigned>(a));
            out.dynamics.push_back(Expr(u.jet(static_cast<unsigned>(a + 1))));
        }
        out.inputs.emplace_back(u.base, SymbolKind::Input, u.jet_order + static_cast<unsigned>(D[j]));
    }
    out.affine = affine_decomposition(out);
    return out;
}

bool is_control_affine(const SystemModel& sys) { return affine_decomposition(sys).has_value(); }

SystemModel affine_lift(const SystemModel& sys) { return prolong(sys, std::vector<int>(sys.m(), 1)); }

int default_prolongation_cap(const SystemModel& sys) { return std::max(0, 2 * static_cast<int>(sys.n()) - 6); }

SearchResult iterative_search(const SystemModel& sys, const std::vector<Expr>& phi, std::optional<int> cap,
                              const AnalyzeOptions& opts) {
    SearchResult res;
    res.cap = cap ? *cap : default_prolongation_cap(sys);
    if (res.cap < 0) throw std::invalid_argument("prolongation cap must be nonnegative");
    res.plan.D.assign(sys.m(), 0);
    SystemModel cur = sys;
    for (int it = 0;; ++it) {
        AnalysisReport rep;
        try {
            rep = analyze(cur, phi, opts);
        } catch (const AnalysisError& e) {
            throw AnalysisError("iteration " + std::to_string(it) + ": " + e.what());
        }
        rep.prolongations = it;
        for (const auto& step : res.plan.history)
            rep.history.push_back(std::string(step.affine_lift ? "affine lift" : "prolongation") + " D=(1,1,1)");
        res.iterations.push_back(rep);
        res.system = cur;
        if (rep.verdict.is_yes()) {
            res.verdict = rep.verdict;
            res.message = "SFE to the triangular form after " + std::to_string(it) + " prolongation(s)";
            return res;
        }
        if (it >= res.cap) break;
        ProlongationStep step{std::vector<int>(cur.m(), 1), !is_control_affine(cur)};
        cur = prolong(cur, step.D);
        for (auto& d : res.plan.D) ++d;
        res.plan.m1 = static_cast<int>(cur.m());
        res.plan.history.push_back(step);
    }
    const std::string msg = "either not x-flat or not phi-SFL via minimal prolongations (cap " +
                            std::to_string(res.cap) + " reached)";
    res.verdict = res.iterations.back().verdict.is_inconclusive() ? TriState::inconclusive(msg) : TriState::no(msg);
    res.message = res.verdict.reason;
    return res;
}

}  // namespace sflat
