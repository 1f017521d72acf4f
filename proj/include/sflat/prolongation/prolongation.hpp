#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sflat/flatness/analysis.hpp"
#include "sflat/geometry/system_model.hpp"

namespace sflat {

struct ProlongationStep {
    std::vector<int> D;
    bool affine_lift = false;
};

struct ProlongationPlan {
    std::vector<int> D;  // accumulated orders per original input
    int m1 = 0;          // inputs prolonged at least once
    std::vector<ProlongationStep> history;
};

/// Appends integrator chains u^j_[0..d^j-1] as states; u^j_[d^j] become inputs.
SystemModel prolong(const SystemModel& sys, const std::vector<int>& D);

/// Every dynamics entry is affine in the inputs (syntactic check).
bool is_control_affine(const SystemModel& sys);

/// One-fold prolongation of every input.
SystemModel affine_lift(const SystemModel& sys);

struct SearchResult {
    std::vector<AnalysisReport> iterations;  // one per analysed system
    SystemModel system;                      // last analysed system
    ProlongationPlan plan;
    TriState verdict;
    std::string message;
    int cap = 0;
    const AnalysisReport& final_report() const { return iterations.back(); }
};

/// 2n - 6 for the original state dimension, never below 0.
int default_prolongation_cap(const SystemModel& sys);

/// Analyse, and while the verdict is not yes, prolong every input once and
/// retry, at most `cap` times.
SearchResult iterative_search(const SystemModel& sys, const std::vector<Expr>& phi, std::optional<int> cap = {},
                              const AnalyzeOptions& opts = {});

}  // namespace sflat
