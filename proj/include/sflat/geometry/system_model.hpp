#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sflat/symbolic/expr.hpp"

namespace sflat {

/// x' = f(x) + sum_j g_j(x) u^j
struct AffineDecomposition {
    std::vector<Expr> drift;                 // f, one entry per state
    std::vector<std::vector<Expr>> columns;  // g_j, one vector per input
};

/// x' = f(x, u) with named states and inputs.
struct SystemModel {
    std::vector<Symbol> states;
    std::vector<Symbol> inputs;
    std::vector<Expr> dynamics;
    std::optional<AffineDecomposition> affine;

    std::size_t n() const { return states.size(); }
    std::size_t m() const { return inputs.size(); }
    std::vector<Var> state_vars() const;
    std::vector<Var> input_vars() const;
    /// Throws std::invalid_argument on arity mismatch or name clashes.
    void validate() const;
};

/// Attempts the syntactic decomposition f + sum g_j u^j. nullopt if some
/// dynamics entry is not affine in the inputs.
std::optional<AffineDecomposition> affine_decomposition(const SystemModel& sys);

}  // namespace sflat
