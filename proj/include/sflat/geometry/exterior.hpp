#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sflat/geometry/system_model.hpp"
#include "sflat/symbolic/linalg.hpp"
#include "sflat/symbolic/tristate.hpp"

namespace sflat {

/// Coordinates (x, u_[0..l_u]) of the extended state-input manifold.
class ExtendedSpace {
public:
    ExtendedSpace(std::vector<Symbol> states, std::vector<Symbol> inputs, unsigned jet_depth);

    const std::vector<Symbol>& states() const { return states_; }
    const std::vector<Symbol>& inputs() const { return inputs_; }
    unsigned jet_depth() const { return depth_; }
    std::size_t dim() const { return coords_.size(); }
    const std::vector<Var>& coords() const { return coords_; }
    Var coord(std::size_t i) const { return coords_[i]; }
    /// Index of `v` among the coordinates, or -1.
    long index_of(Var v) const;
    bool is_state_index(std::size_t i) const { return i < states_.size(); }
    std::vector<std::size_t> state_indices() const;
    std::vector<std::size_t> jet_indices() const;
    /// Symbol of input j at jet order a.
    Symbol input_jet(std::size_t j, unsigned a) const { return inputs_[j].jet(a); }

private:
    std::vector<Symbol> states_;
    std::vector<Symbol> inputs_;
    unsigned depth_;
    std::vector<Var> coords_;
    std::unordered_map<Var, std::size_t> index_;
};

struct VectorField {
    std::shared_ptr<const ExtendedSpace> space;
    std::vector<Expr> coeffs;
};

/// f on states, u_[a+1] on jet a < l_u, 0 on the top jets.
VectorField extended_vector_field(const SystemModel& sys, unsigned jet_depth);

/// sum_i v^i d_i h. Symbols outside the space are constants.
Expr lie_scalar(const VectorField& v, const Expr& h);

struct OneForm {
    std::vector<Expr> coeffs;
    bool is_zero() const;
};

OneForm differential(const Expr& h, const ExtendedSpace& space);

/// Antisymmetric table c_ij = d_i w_j - d_j w_i, stored for i < j (nonzero only).
struct TwoForm {
    std::size_t dim = 0;
    std::map<std::pair<std::size_t, std::size_t>, Expr> coeffs;
    Expr at(std::size_t i, std::size_t j) const;
    bool is_zero() const { return coeffs.empty(); }
};

TwoForm exterior_derivative(const OneForm& w, const ExtendedSpace& space);

class ContainmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Span of one-forms, stored as a basis (rows of `basis`).
class Codistribution {
public:
    Codistribution() = default;
    /// Reduces the spanning set to an independent subset at a sampled point.
    static Codistribution span(std::shared_ptr<const ExtendedSpace> space, const std::vector<OneForm>& forms,
                               const SampleOptions& opts = {});
    static Codistribution span(std::shared_ptr<const ExtendedSpace> space, const ExprMatrix& rows,
                               const SampleOptions& opts = {});
    static Codistribution of_differentials(std::shared_ptr<const ExtendedSpace> space, const std::vector<Expr>& fns,
                                           const SampleOptions& opts = {});

    const std::shared_ptr<const ExtendedSpace>& space() const { return space_; }
    const ExprMatrix& basis() const { return basis_; }
    std::size_t rank() const { return basis_.rows(); }
    const Point& certificate() const { return certificate_; }
    OneForm form(std::size_t i) const { return {basis_.row(i)}; }
    /// Rows of the basis that touch a jet coordinate are absent.
    bool within_state_span() const;

private:
    std::shared_ptr<const ExtendedSpace> space_;
    ExprMatrix basis_;
    Point certificate_;
};

/// Rank of the stack of `extra` onto `d` exceeds rank(d)?
bool extends(const Codistribution& d, const ExprMatrix& extra, const SampleOptions& opts = {});
/// inner is contained in outer (stack-and-rank).
bool contains(const Codistribution& outer, const Codistribution& inner, const SampleOptions& opts = {});

/// rank(outer) - rank(inner); throws ContainmentError when inner is not in outer.
std::size_t corank(const Codistribution& inner, const Codistribution& outer, const SampleOptions& opts = {});

/// P intersected with span<dx>: jet columns are eliminated first.
Codistribution intersect_with_state_span(const Codistribution& p, const SampleOptions& opts = {});

struct FrobeniusResult {
    TriState verdict;
    /// Offending coefficient when verdict is not yes.
    std::optional<Expr> witness;
};

/// dw^a ^ w^1 ^ ... ^ w^k = 0 for every basis form, checked as dw^a(v, w) = 0
/// on pairs of annihilator vectors of the reduced basis.
FrobeniusResult frobenius_integrable(const Codistribution& d, const SampleOptions& opts = {});

}  // namespace sflat
