#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sflat/flatness/analysis.hpp"
#include "sflat/geometry/system_model.hpp"
#include "sflat/symbolic/linalg.hpp"

namespace sflat {

/// Raised when the triangular construction cannot proceed (no generator for
/// a level, non-invertible chart, unsolvable step).
class TriangularError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

struct NamedExpr {
    std::string name;
    Expr value;
};

struct ChartEntry {
    Symbol z;
    Expr fn;             // in the states of the analysed system
    std::string origin;  // "phi^2_[1]", "state", "product", "sum", "hint:name", ...
};

/// z = Phi(x) grouped into the chains z1 (k1), z2 (p2), z3 (r3).
struct CoordinateChart {
    std::array<std::vector<ChartEntry>, 3> chains;
    std::vector<Symbol> source_states;
    /// x in terms of z, when solve_for manages the inversion.
    std::optional<Bindings> inverse;
    std::vector<Expr> inverse_guards;  // in z
    RankResult jacobian;
    int verified_points = 0;  // random points where the Jacobian has full rank

    std::size_t size() const { return chains[0].size() + chains[1].size() + chains[2].size(); }
    std::vector<Symbol> z_symbols() const;
    std::vector<Expr> functions() const;
    const ChartEntry& entry(int chain, int index) const {  // 1-based, as in z_chain^index
        return chains[static_cast<std::size_t>(chain - 1)][static_cast<std::size_t>(index - 1)];
    }
};

/// Chart generators from the Q-sequence of an analysed system. `phi` is the
/// arranged candidate (AnalysisReport::candidate.phi).
CoordinateChart extract_coordinates(const SystemModel& sys, const std::vector<Expr>& phi,
                                    const DerivativeStructure& ds, const QSequence& seq,
                                    const std::vector<NamedExpr>& hints = {}, const SampleOptions& opts = {});

/// The states themselves as chart, read chain by chain in declaration order.
/// For systems that are already written in the triangular form.
CoordinateChart identity_chart(const SystemModel& sys, const std::array<int, 3>& dims);

struct InputTransform {
    Symbol input;          // uh1, uh2, uh3
    Symbol replaced;       // input it replaces
    Expr definition;       // in the analysed coordinates (x, u)
    Expr definition_z;     // in z and the earlier new inputs
    Expr inverse;          // replaced input in terms of the new one
    std::vector<Expr> guards;
};

struct GtfRow {
    int chain = 0;  // 1..3
    int index = 0;  // 1-based position in the chain
    Expr f;
    Expr a;
    Expr b1, b2, b3;
    std::vector<Var> allowed;
};

struct GTF3Form {
    int k1 = 0, k2 = 0, k3 = 0, p2 = 0, p3 = 0, r3 = 0, delta = 0;
    CoordinateChart chart;
    SystemModel z_system;  // states z, inputs (uh1, uh2, uh3)
    std::vector<Symbol> source_inputs;  // inputs of the analysed system
    std::array<InputTransform, 3> inputs;
    std::vector<GtfRow> rows;  // chain-major
    std::string taint;         // inconclusive forbidden-dependency tests

    std::array<int, 3> dims() const { return {k1, p2, r3}; }
    const GtfRow& row(int chain, int index) const;
    Var z(int chain, int index) const { return chart.entry(chain, index).z.var(); }
};

/// Rewrites the analysed system in the chart, introduces uh2 and uh3 and
/// checks the triangular dependency pattern.
GTF3Form build_transformation(const CoordinateChart& chart, const SystemModel& sys, const DerivativeStructure& ds,
                              const SampleOptions& opts = {});

struct RegularityEntry {
    /// "b21_k2", "b31_k3" (first coefficients), "delta_range" (i < delta),
    /// "coupled_range" (2x2 determinant), "upper_range" (p3-k3 <= i < r3-k3).
    std::string condition;
    int i = -1;             // index within the range, -1 for scalar or vacuous entries
    bool vacuous = false;
    Expr expr;
    /// yes when the expression is certified nonzero (the condition holds).
    TriState holds;
};

struct RegularityReport {
    std::vector<RegularityEntry> entries;
    bool any_fails() const;
    bool all_hold() const;
};

RegularityReport check_regularity(const GTF3Form& g, const SampleOptions& opts = {});

struct FlatParameterization {
    /// Flat jets y^j_[l] use the arranged component order, base names y1, y2, y3.
    std::array<std::string, 3> base;
    std::array<int, 3> R{};
    std::vector<Symbol> states;  // analysed system
    std::vector<Symbol> inputs;
    std::vector<Expr> F_x;
    std::vector<Expr> F_u;
    Bindings z_values;                        // z in flat jets
    std::array<Expr, 3> u_hat;                // uh1..uh3 in flat jets
    std::vector<Expr> guards;                 // must not vanish
    /// Defining equations of each step with the solved values substituted.
    std::vector<Expr> residuals;

    Symbol jet(int component, int order) const;  // component 1..3
    /// Highest jet order of each component in F_x (resp. F_u); -1 if absent.
    std::array<int, 3> max_order(const std::vector<Expr>& exprs) const;
};

FlatParameterization parameterize(const GTF3Form& g, const SampleOptions& opts = {});

struct VerificationReport {
    int trials = 0;
    int rejected = 0;  // jet draws discarded for guard violations
    double max_drift = 0.0;
    bool pass = false;
    std::string failure;  // first failing trial, if any
};

/// Time derivatives y^j_[l] as a double-valued polynomial trajectory.
struct JetTrajectory {
    std::array<std::vector<double>, 3> coeffs;  // Taylor coefficients y^j_[l](0)
    double value(int component, int order, double t) const;
};

/// Guard check on a point of flat jets; false if any guard is below `tol` or
/// not evaluable.
bool guards_hold(const FlatParameterization& F, const Point& jets, double tol = 1e-3);

/// One RK4 step of `sys` driven by F_u along a random polynomial flat
/// trajectory; compares x(dt) with F_x and phi(x(dt)) with y(dt).
VerificationReport verify_parameterization(const SystemModel& sys, const FlatParameterization& F,
                                           const std::vector<Expr>& phi, int trials = 25, std::uint64_t seed = 0,
                                           double dt = 1e-4, double tolerance = 1e-6);

struct TriangularResult {
    CoordinateChart chart;
    GTF3Form form;
    RegularityReport regularity;
    std::optional<FlatParameterization> parameterization;
    std::vector<std::string> diagnostics;
};

/// Chart, transformation, regularity and (if regular) parameterization for
/// an analysis report with verdict yes.
TriangularResult triangularize(const AnalysisReport& rep, const std::vector<NamedExpr>& hints = {},
                               const SampleOptions& opts = {});

}  // namespace sflat
