#include <algorithm>

#include "sflat/flatness/analysis.hpp"

namespace sflat {

MultiIndex multi_index_A(const MultiIndex& K, int delta, int i) {
    return {K[0] - 1 + i, K[1] - 1 + std::max(i - delta, 0), K[2] - 1 + i};
}

int expected_corank(const DerivativeStructure& ds, int i) {
    if (i <= 0) return 0;
    if (i <= ds.delta) return 1;
    if (i <= ds.p3 - ds.K[2]) return 2;
    return 1;
}

QSequence build_sequences(const SystemModel& sys, const std::vector<Expr>& phi, const DerivativeStructure& ds,
                          const SampleOptions& opts) {
    QSequence seq;
    const int depth = std::max(ds.d_max, 0);
    OutputJets jets(sys, phi, depth + 1);
    auto space = std::make_shared<const ExtendedSpace>(sys.states, sys.inputs, static_cast<unsigned>(depth));
    for (int i = 0; i <= ds.d_max; ++i) {
        QLevel level;
        level.A = multi_index_A(ds.K, ds.delta, i);
        std::vector<Expr> fns;
        for (std::size_t j = 0; j < 3; ++j)
            for (int l = 0; l <= level.A[j]; ++l) fns.push_back(jets.get(j, l));
        level.P = Codistribution::of_differentials(space, fns, opts);
        level.Q = intersect_with_state_span(level.P, opts);
        level.expected_corank = expected_corank(ds, i);
        if (i > 0) {
            try {
                level.corank = static_cast<int>(corank(seq.levels.back().Q, level.Q, opts));
            } catch (const ContainmentError& e) {
                throw StructureError("Q_A(" + std::to_string(i - 1) + ") is not contained in Q_A(" +
                                     std::to_string(i) + "): " + e.what());
            }
            if (level.corank != level.expected_corank)
                throw StructureError("corank of Q_A(" + std::to_string(i) + ") = Q" + level.A.to_string() +
                                     " over its predecessor is " + std::to_string(level.corank) + ", expected " +
                                     std::to_string(level.expected_corank));
        }
        level.integrable = frobenius_integrable(level.Q, opts).verdict;
        seq.levels.push_back(std::move(level));
    }
    return seq;
}

TriState sfe_verdict(const QSequence& seq) {
    bool all_yes = true;
    for (std::size_t i = 0; i < seq.levels.size(); ++i) {
        const TriState& t = seq.levels[i].integrable;
        if (t.is_no()) {
            TriState out = TriState::no("Q_A(" + std::to_string(i) + ") is not integrable: " + t.reason, t.certificate);
            return out;
        }
        all_yes = all_yes && t.is_yes();
    }
    if (all_yes) return TriState::yes("every codistribution of the sequence is integrable");
    return TriState::inconclusive("some integrability tests were inconclusive");
}

}  // namespace sflat
