#include "sflat/flatness/analysis.hpp"

namespace sflat {

AnalysisReport analyze(const SystemModel& sys, const std::vector<Expr>& phi, const AnalyzeOptions& opts) {
    AnalysisReport rep;
    rep.n = sys.n();
    rep.system = sys;
    if (sys.m() != 3) throw AnalysisError("the analysis handles three-input systems only");
    if (phi.size() != 3) throw AnalysisError("flat-output candidate must have three components");
    if (opts.require_affine && !affine_decomposition(sys)) {
        rep.verdict = TriState::inconclusive("not control-affine; use prolong-search");
        return rep;
    }
    const SampleOptions& so = opts.sampling;
    const int n = static_cast<int>(sys.n());
    try {
        MultiIndex K = relative_degrees(sys, phi);
        MultiIndex R = determine_R(sys, phi, K, so);
        rep.candidate.d_diff = differential_difference(R, n);
        const auto order = rearrange_components(K, R);
        std::vector<Expr> phi_p{phi[static_cast<std::size_t>(order[0])], phi[static_cast<std::size_t>(order[1])],
                                phi[static_cast<std::size_t>(order[2])]};
        rep.candidate.phi = phi_p;
        rep.candidate.K = permute(K, order);
        rep.candidate.R = permute(R, order);
        rep.candidate.permutation = order;
        K = rep.candidate.K;
        R = rep.candidate.R;

        InputReplacement norm = normalize_u1(sys, phi_p, K, so);
        rep.normalized = norm.system;
        DerivativeStructure ds = derivative_structure(norm, phi_p, K, R, so);
        if (!ds.taint.empty()) rep.diagnostics.push_back("derivative structure: " + ds.taint);
        rep.ds = ds;
        rep.identities = structure_identities(ds, n);
        for (const auto& id : rep.identities)
            if (!id.pass)
                throw StructureError("identity " + id.name + " fails: " + std::to_string(id.lhs) +
                                     " != " + std::to_string(id.rhs));
        rep.minimal_sfl = minimal_sfl_check(ds, norm, phi_p, opts.phi_u2_hint, so);

        for (int i = 0; i <= ds.d_max; ++i) rep.A.push_back(multi_index_A(K, ds.delta, i));
        QSequence seq = build_sequences(sys, phi_p, ds, so);
        int total = 0;
        for (std::size_t i = 0; i < seq.levels.size(); ++i) {
            const QLevel& lv = seq.levels[i];
            if (i > 0) rep.coranks.push_back(lv.corank);
            total += lv.corank;
            rep.integrable.push_back(lv.integrable);
        }
        if (total != n - K.sum())
            rep.diagnostics.push_back("corank sum " + std::to_string(total) + " differs from n - sum(K) = " +
                                      std::to_string(n - K.sum()));
        for (std::size_t i : {std::size_t{0}, seq.levels.size() - 1})
            if (!seq.levels[i].integrable.is_yes())
                rep.diagnostics.push_back("Q_A(" + std::to_string(i) + ") should be integrable but the test says " +
                                          to_string(seq.levels[i].integrable) + ": " + seq.levels[i].integrable.reason);
        rep.verdict = sfe_verdict(seq);
        if (rep.verdict.is_yes() && !ds.taint.empty())
            rep.verdict = TriState::inconclusive("sequence integrable but indices are tainted: " + ds.taint);
        rep.sequence = std::move(seq);
    } catch (const StructureError& e) {
        rep.verdict = TriState::no(e.what());
        rep.diagnostics.push_back(e.what());
    } catch (const InconclusiveError& e) {
        rep.verdict = TriState::inconclusive(e.what());
        rep.diagnostics.push_back(e.what());
    }
    return rep;
}

}  // namespace sflat
