#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sflat/symbolic/expr.hpp"
#include "sflat/symbolic/zero_test.hpp"

namespace sflat {

class ExprMatrix {
public:
    ExprMatrix() = default;
    ExprMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Expr(0)) {}
    static ExprMatrix from_rows(const std::vector<std::vector<Expr>>& rows, std::size_t cols = 0);
    static ExprMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Expr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<Expr> row(std::size_t i) const;
    void append_row(const std::vector<Expr>& r);
    ExprMatrix transpose() const;
    ExprMatrix select_rows(const std::vector<std::size_t>& idx) const;
    ExprMatrix select_cols(const std::vector<std::size_t>& idx) const;
    /// Vertical concatenation; column counts must agree.
    ExprMatrix stacked(const ExprMatrix& below) const;
    bool row_is_zero(std::size_t i) const;
    std::set<Var> free_symbols() const;

    friend ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Expr> data_;
};

class RankError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RankResult {
    std::size_t rank = 0;
    /// Rows (resp. columns) of a nonsingular rank-sized minor.
    std::vector<std::size_t> pivot_rows;
    std::vector<std::size_t> pivot_cols;
    /// Sample point at which that minor is numerically nonsingular.
    Point certificate;
};

/// Rank over the field of rational expressions by fraction-free (Bareiss)
/// elimination, with a sampled certificate. Throws RankError when no sample
/// attains the symbolic rank.
RankResult generic_rank(const ExprMatrix& m, const SampleOptions& opts = {});

/// Rank at random rational points (maximum over `points` draws). pivot_rows
/// is the lexicographically first independent row set at the best point.
RankResult sampled_rank(const ExprMatrix& m, const SampleOptions& opts = {}, int points = 3);

/// Rank of the matrix evaluated at `p`; nullopt at a pole.
std::optional<std::size_t> rank_at(const ExprMatrix& m, const Point& p);

struct Rref {
    ExprMatrix reduced;                 // pivot rows first, then the remaining rows
    std::vector<std::size_t> pivot_cols;  // one per pivot row
    std::vector<std::size_t> row_origin;  // input row index of each output row
    std::size_t rank() const { return pivot_cols.size(); }
};

/// Gauss-Jordan elimination over the rational-expression field, pivoting only
/// on `columns` in the given order (all columns in natural order if empty).
/// Among candidate pivots the entry of lowest total degree wins, ties by row.
Rref rref(const ExprMatrix& m, const std::vector<std::size_t>& columns = {});

/// Basis rows r with r * m = 0.
ExprMatrix left_nullspace(const ExprMatrix& m);

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Solution {
    Bindings values;
    /// Expressions that must not vanish for the solution to be valid.
    std::vector<Expr> guards;
};

/// Solves equations (each meaning expr = 0) for the unknowns. Handles
/// equations with a single remaining unknown that is affine or appears only
/// as c*u^k, then jointly affine subsystems.
Solution solve_for(const std::vector<Expr>& equations, const std::vector<Var>& unknowns);

/// Total degree of numerator plus denominator; used for pivot choice.
unsigned expr_weight(const Expr& e);

}  // namespace sflat
