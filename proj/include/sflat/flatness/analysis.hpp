#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sflat/flatness/multi_index.hpp"
#include "sflat/geometry/exterior.hpp"
#include "sflat/geometry/system_model.hpp"
#include "sflat/symbolic/tristate.hpp"

namespace sflat {

/// Hard failures of the analysis (structure violated, bounds exceeded).
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The candidate contradicts the structure a flat output must have; the
/// pipeline reports this as verdict "no".
class StructureError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

/// Zero tests could not decide a step the pipeline depends on.
class InconclusiveError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

struct FlatOutputCandidate {
    std::vector<Expr> phi;  // three components, state symbols only
    MultiIndex K;
    MultiIndex R;
    int d_diff = 0;
    /// order[slot] = original component index placed in that slot.
    std::array<int, 3> permutation{0, 1, 2};
};

/// Time derivatives of the flat output along a system: jets[j][l] = phi^j_[l].
class OutputJets {
public:
    /// `depth` bounds the input jets the field knows about (default 3n + 2).
    OutputJets(const SystemModel& sys, std::vector<Expr> phi, int depth = -1);
    const Expr& get(std::size_t j, int l);
    const VectorField& field() const { return field_; }
    const SystemModel& system() const { return sys_; }

private:
    SystemModel sys_;
    VectorField field_;
    std::vector<std::vector<Expr>> jets_;
};

/// Result of replacing one input by a new one defined as a function of (x, u).
struct InputReplacement {
    SystemModel system;       // dynamics in the new inputs
    Symbol new_input;
    std::size_t replaced = 0;  // index into the old input list
    Symbol replaced_symbol;
    Expr definition;  // new input in old coordinates
    Expr inverse;     // replaced input in new coordinates
    std::vector<Expr> guards;
    std::map<std::string, std::string> certificate;  // where the solved coefficient is nonzero
};

/// Solves `definition = new_input` for the lowest-index input among
/// `candidates` whose coefficient is certified nonzero. The new input is
/// inserted at `position` of the remaining input list.
InputReplacement replace_input(const SystemModel& sys, const Expr& definition, const Symbol& new_input,
                               const std::vector<std::size_t>& candidates, std::size_t position,
                               const SampleOptions& opts = {});

struct DerivativeStructure {
    std::array<std::vector<Expr>, 3> jets;  // normalized phi^j_[l], l = 0..r^j
    Expr u1_hat_definition;                 // phi^1_[k^1] in the analysed coordinates
    std::size_t replaced_input = 0;
    Symbol u1_hat;
    /// Remaining inputs in the role of u^2 and u^3 (indices into the normalized inputs).
    std::size_t u2_index = 1;
    std::size_t u3_index = 2;
    MultiIndex K, R, P;
    int p2 = 0, p3 = 0, s = 0, d_rp = 0, d_max = 0, d_min = 0, delta = 0;
    /// Set when zero tests were inconclusive; s is then a lower bound.
    std::string taint;
};

struct IdentityCheck {
    std::string name;
    int lhs = 0;
    int rhs = 0;
    bool pass = false;
};

struct QLevel {
    MultiIndex A;
    Codistribution P;
    Codistribution Q;
    int corank = 0;  // over the predecessor (0 for the first level)
    int expected_corank = 0;
    TriState integrable;
};

struct QSequence {
    std::vector<QLevel> levels;
};

struct MinimalSflResult {
    TriState verdict;
    std::optional<Expr> phi_u2;  // adopted or hinted input transformation
    int s = 0;
};

struct AnalysisReport {
    std::size_t n = 0;
    FlatOutputCandidate candidate;
    std::optional<DerivativeStructure> ds;
    std::vector<IdentityCheck> identities;
    std::optional<MinimalSflResult> minimal_sfl;
    std::vector<MultiIndex> A;
    std::vector<int> coranks;
    std::vector<TriState> integrable;
    std::optional<QSequence> sequence;
    TriState verdict;
    std::vector<std::string> diagnostics;
    int prolongations = 0;
    std::vector<std::string> history;
    /// The analysed (possibly lifted) system and its normalized form.
    std::optional<SystemModel> system;
    std::optional<SystemModel> normalized;
};

// -- indices

/// Smallest k^j with an input in the k^j-th Lie derivative (bound 2n).
MultiIndex relative_degrees(const SystemModel& sys, const std::vector<Expr>& phi);

/// Componentwise-minimal R with span<dx> in span<dphi_[0,R-1]> and
/// span<dx,du> in span<dphi_[0,R]>; search bounded by sum(R) <= 3n.
MultiIndex determine_R(const SystemModel& sys, const std::vector<Expr>& phi, const MultiIndex& K,
                       const SampleOptions& opts = {});

int differential_difference(const MultiIndex& R, int n);

/// order[slot] = original component, so that r1-k1 = r3-k3 >= r2-k2.
std::array<int, 3> rearrange_components(const MultiIndex& K, const MultiIndex& R);

template <typename T>
std::array<T, 3> permute(const std::array<T, 3>& a, const std::array<int, 3>& order) {
    return {a[order[0]], a[order[1]], a[order[2]]};
}
MultiIndex permute(const MultiIndex& m, const std::array<int, 3>& order);

// -- structure

/// u1_hat = phi^1_[k^1] replaces an input; the new input leads the list.
InputReplacement normalize_u1(const SystemModel& sys, const std::vector<Expr>& phi, const MultiIndex& K,
                              const SampleOptions& opts = {});

DerivativeStructure derivative_structure(const InputReplacement& norm, const std::vector<Expr>& phi,
                                         const MultiIndex& K, const MultiIndex& R, const SampleOptions& opts = {});

std::vector<IdentityCheck> structure_identities(const DerivativeStructure& ds, int n);

/// s for a given labelling of the remaining inputs; returns -1 if the u^3
/// input never appears up to r^j.
int detect_s(OutputJets& jets, const MultiIndex& P, const MultiIndex& R, const Symbol& u3, std::string* taint,
             const SampleOptions& opts = {});

MinimalSflResult minimal_sfl_check(const DerivativeStructure& ds, const InputReplacement& norm,
                                   const std::vector<Expr>& phi, const std::optional<Expr>& hint,
                                   const SampleOptions& opts = {});

// -- sequences

MultiIndex multi_index_A(const MultiIndex& K, int delta, int i);

/// Expected corank of Q_A(i) over Q_A(i-1).
int expected_corank(const DerivativeStructure& ds, int i);

/// Builds P_A(i) and Q_A(i) for i = 0..d_max in the coordinates of `sys`.
QSequence build_sequences(const SystemModel& sys, const std::vector<Expr>& phi, const DerivativeStructure& ds,
                          const SampleOptions& opts = {});

TriState sfe_verdict(const QSequence& seq);

struct AnalyzeOptions {
    SampleOptions sampling;
    std::optional<Expr> phi_u2_hint;
    /// When false, non-affine systems are analysed as they are instead of
    /// being reported inconclusive.
    bool require_affine = true;
};

/// Index computation, derivative structure and Q-sequence verdict for a
/// control-affine three-input system.
AnalysisReport analyze(const SystemModel& sys, const std::vector<Expr>& phi, const AnalyzeOptions& opts = {});

/// True when `e` certainly depends on v (structural presence plus a
/// nonzero partial derivative); inconclusive zero tests set `uncertain`.
bool explicitly_depends(const Expr& e, Var v, bool* uncertain = nullptr, const SampleOptions& opts = {});

}  // namespace sflat
