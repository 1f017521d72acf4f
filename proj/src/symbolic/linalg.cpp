#include "sflat/symbolic/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sflat {

ExprMatrix ExprMatrix::from_rows(const std::vector<std::vector<Expr>>& rows, std::size_t cols) {
    if (!rows.empty()) cols = rows.front().size();
    ExprMatrix m(0, cols);
    for (const auto& r : rows) m.append_row(r);
    return m;
}

ExprMatrix ExprMatrix::identity(std::size_t n) {
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Expr(1);
    return m;
}

std::vector<Expr> ExprMatrix::row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

void ExprMatrix::append_row(const std::vector<Expr>& r) {
    if (r.size() != cols_) throw std::invalid_argument("row length does not match column count");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
}

ExprMatrix ExprMatrix::transpose() const {
    ExprMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

ExprMatrix ExprMatrix::select_rows(const std::vector<std::size_t>& idx) const {
    ExprMatrix out(0, cols_);
    for (std::size_t i : idx) out.append_row(row(i));
    return out;
}

ExprMatrix ExprMatrix::select_cols(const std::vector<std::size_t>& idx) const {
    ExprMatrix out(rows_, idx.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out(i, j) = (*this)(i, idx[j]);
    return out;
}

ExprMatrix ExprMatrix::stacked(const ExprMatrix& below) const {
    if (rows_ == 0) return below;
    if (below.rows_ == 0) return *this;
    if (below.cols_ != cols_) throw std::invalid_argument("stacking matrices with different column counts");
    ExprMatrix out = *this;
    out.data_.insert(out.data_.end(), below.data_.begin(), below.data_.end());
    out.rows_ += below.rows_;
    return out;
}

bool ExprMatrix::row_is_zero(std::size_t i) const {
    for (std::size_t j = 0; j < cols_; ++j)
        if (!(*this)(i, j).is_zero()) return false;
    return true;
}

std::set<Var> ExprMatrix::free_symbols() const {
    std::set<Var> out;
    for (const auto& e : data_)
        for (Var v : e.free_symbols()) out.insert(v);
    return out;
}

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    ExprMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Expr& aik = a(i, k);
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < b.cols_; ++j)
                if (!b(k, j).is_zero()) c(i, j) += aik * b(k, j);
        }
    return c;
}

unsigned expr_weight(const Expr& e) { return e.num().degree() + e.den().degree(); }

// ------------------------------------------------------------ numeric rank

namespace {

struct Echelon {
    std::size_t rank = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
};

Echelon greedy_exact(const std::vector<std::vector<Rational>>& a) {
    Echelon out;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<Rational> r = a[i];
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const Rational f = r[out.cols[b]];
            if (f == 0) continue;
            for (std::size_t j = 0; j < r.size(); ++j) r[j] -= f * basis[b][j];
        }
        auto it = std::find_if(r.begin(), r.end(), [](const Rational& x) { return x != 0; });
        if (it == r.end()) continue;
        const std::size_t p = static_cast<std::size_t>(it - r.begin());
        const Rational inv = 1 / r[p];
        for (auto& x : r) x *= inv;
        basis.push_back(std::move(r));
        out.rows.push_back(i);
        out.cols.push_back(p);
    }
    out.rank = basis.size();
    return out;
}

Echelon greedy_double(const std::vector<std::vector<double>>& a) {
    Echelon out;
    double scale = 0.0;
    for (const auto& r : a)
        for (double x : r) scale = std::max(scale, std::fabs(x));
    const double tol = kZeroTolerance * std::max(scale, 1.0);
    std::vector<std::vector<double>> basis;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<double> r = a[i];
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const double f = r[out.cols[b]];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < r.size(); ++j) r[j] -= f * basis[b][j];
        }
        std::size_t p = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (std::fabs(r[j]) > best) {
                best = std::fabs(r[j]);
                p = j;
            }
        if (best <= tol) continue;
        const double inv = 1.0 / r[p];
        for (auto& x : r) x *= inv;
        basis.push_back(std::move(r));
        out.rows.push_back(i);
        out.cols.push_back(p);
    }
    out.rank = basis.size();
    return out;
}

std::optional<Echelon> echelon_at(const ExprMatrix& m, const Point& p) {
    bool exact = true;
    for (std::size_t i = 0; i < m.rows() && exact; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j).has_kernels()) {
                exact = false;
                break;
            }
    if (exact) {
        std::vector<std::vector<Rational>> a(m.rows(), std::vector<Rational>(m.cols()));
        bool ok = true;
        for (std::size_t i = 0; i < m.rows() && ok; ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (m(i, j).is_zero()) continue;
                auto v = evaluate_exact(m(i, j), p);
                if (!v) {
                    ok = false;
                    break;
                }
                a[i][j] = *v;
            }
        if (ok) return greedy_exact(a);
    }
    std::vector<std::vector<double>> a(m.rows(), std::vector<double>(m.cols(), 0.0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j).is_zero()) continue;
            auto v = evaluate(m(i, j), p);
            if (!v) return std::nullopt;
            a[i][j] = *v;
        }
    return greedy_double(a);
}

bool matrix_needs_positive(const ExprMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j).has_kernels() && needs_positive_samples(m(i, j))) return true;
    return false;
}

}  // namespace

std::optional<std::size_t> rank_at(const ExprMatrix& m, const Point& p) {
    auto e = echelon_at(m, p);
    if (!e) return std::nullopt;
    return e->rank;
}

RankResult sampled_rank(const ExprMatrix& m, const SampleOptions& opts, int points) {
    RankResult best;
    if (m.rows() == 0 || m.cols() == 0) return best;
    const std::set<Var> vars = m.free_symbols();
    const bool positive = matrix_needs_positive(m);
    Sampler sampler(opts);
    int good = 0;
    const std::size_t cap = std::min(m.rows(), m.cols());
    for (int attempt = 0; attempt < std::max(points, 1) * 5 && good < points; ++attempt) {
        Point p = sampler.draw(vars, positive);
        auto e = echelon_at(m, p);
        if (!e) continue;
        ++good;
        if (good == 1 || e->rank > best.rank) {
            best.rank = e->rank;
            best.pivot_rows = e->rows;
            best.pivot_cols = e->cols;
            best.certificate = p;
        }
        if (best.rank == cap) break;
    }
    if (good == 0) throw RankError("every sample point is a pole of the matrix");
    return best;
}

// ------------------------------------------------------------ Bareiss

namespace {

Poly poly_lcm(const Poly& a, const Poly& b) {
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    Poly g = gcd(a, b);
    return *(a * b).divide_exact(g);
}

}  // namespace

RankResult generic_rank(const ExprMatrix& m, const SampleOptions& opts) {
    const std::size_t R = m.rows(), C = m.cols();
    std::vector<std::vector<Poly>> a(R, std::vector<Poly>(C));
    for (std::size_t i = 0; i < R; ++i) {
        Poly l(1);
        for (std::size_t j = 0; j < C; ++j) l = poly_lcm(l, m(i, j).den());
        for (std::size_t j = 0; j < C; ++j) {
            if (m(i, j).is_zero()) continue;
            a[i][j] = m(i, j).num() * *l.divide_exact(m(i, j).den());
        }
    }
    std::vector<std::size_t> rperm(R), cperm(C);
    std::iota(rperm.begin(), rperm.end(), 0);
    std::iota(cperm.begin(), cperm.end(), 0);
    Poly prev(1);
    std::size_t k = 0;
    for (; k < std::min(R, C); ++k) {
        // Lowest total degree pivot, then fewest terms, then column, then row.
        std::size_t pi = R, pj = C;
        for (std::size_t j = k; j < C; ++j)
            for (std::size_t i = k; i < R; ++i) {
                if (a[i][j].is_zero()) continue;
                if (pi == R) {
                    pi = i, pj = j;
                    continue;
                }
                const Poly& c = a[i][j];
                const Poly& b = a[pi][pj];
                auto key = [&](const Poly& p, std::size_t col, std::size_t row) {
                    return std::make_tuple(p.degree(), p.size(), cperm[col], rperm[row]);
                };
                if (key(c, j, i) < key(b, pj, pi)) pi = i, pj = j;
            }
        if (pi == R) break;
        std::swap(a[k], a[pi]);
        std::swap(rperm[k], rperm[pi]);
        if (pj != k) {
            for (auto& row : a) std::swap(row[k], row[pj]);
            std::swap(cperm[k], cperm[pj]);
        }
        for (std::size_t i = k + 1; i < R; ++i) {
            for (std::size_t j = k + 1; j < C; ++j) {
                Poly v = a[k][k] * a[i][j] - a[i][k] * a[k][j];
                if (!prev.is_one() && !v.is_zero()) {
                    auto q = v.divide_exact(prev);
                    if (!q) throw RankError("fraction-free elimination lost exact divisibility");
                    v = std::move(*q);
                }
                a[i][j] = std::move(v);
            }
            a[i][k] = Poly();
        }
        prev = a[k][k];
    }
    RankResult out;
    out.rank = k;
    out.pivot_rows.assign(rperm.begin(), rperm.begin() + static_cast<std::ptrdiff_t>(k));
    out.pivot_cols.assign(cperm.begin(), cperm.begin() + static_cast<std::ptrdiff_t>(k));
    if (k == 0) return out;

    // Certificate: a point where the selected minor is nonsingular.
    ExprMatrix minor = m.select_rows(out.pivot_rows).select_cols(out.pivot_cols);
    const std::set<Var> vars = m.free_symbols();
    const bool positive = matrix_needs_positive(m);
    Sampler sampler(opts);
    std::size_t best = 0;
    for (int t = 0; t < std::max(opts.samples, 1); ++t) {
        Point p = sampler.draw(vars, positive);
        auto full = rank_at(m, p);
        if (!full) continue;
        if (*full > k)
            throw RankError("symbolic rank " + std::to_string(k) + " below sampled rank " + std::to_string(*full));
        auto r = rank_at(minor, p);
        if (r && *r == k) {
            out.certificate = p;
            return out;
        }
        best = std::max(best, *full);
    }
    throw RankError("inconclusive rank: symbolic " + std::to_string(k) + ", best sampled " + std::to_string(best));
}

// ------------------------------------------------------------ RREF

Rref rref(const ExprMatrix& m, const std::vector<std::size_t>& columns) {
    std::vector<std::size_t> order = columns;
    if (order.empty()) {
        order.resize(m.cols());
        std::iota(order.begin(), order.end(), 0);
    }
    std::vector<std::vector<Expr>> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row(i));
    std::vector<std::size_t> origin(m.rows());
    std::iota(origin.begin(), origin.end(), 0);

    std::vector<std::size_t> pivots;
    std::size_t next = 0;  // rows [0, next) are pivot rows
    for (std::size_t col : order) {
        if (next == rows.size()) break;
        std::size_t pick = rows.size();
        for (std::size_t i = next; i < rows.size(); ++i) {
            const Expr& e = rows[i][col];
            if (e.is_zero()) continue;
            if (pick == rows.size()) {
                pick = i;
                continue;
            }
            const Expr& b = rows[pick][col];
            auto key = [](const Expr& x) { return std::make_pair(expr_weight(x), x.num().size() + x.den().size()); };
            if (key(e) < key(b)) pick = i;
        }
        if (pick == rows.size()) continue;
        std::swap(rows[next], rows[pick]);
        std::swap(origin[next], origin[pick]);
        auto& prow = rows[next];
        const Expr inv = Expr(1) / prow[col];
        if (!inv.is_one())
            for (auto& x : prow)
                if (!x.is_zero()) x = x * inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == next || rows[i][col].is_zero()) continue;
            const Expr f = rows[i][col];
            for (std::size_t j = 0; j < prow.size(); ++j)
                if (!prow[j].is_zero()) rows[i][j] = rows[i][j] - f * prow[j];
        }
        pivots.push_back(col);
        ++next;
    }
    Rref out;
    out.reduced = ExprMatrix::from_rows(rows, m.cols());
    out.pivot_cols = std::move(pivots);
    out.row_origin = std::move(origin);
    return out;
}

ExprMatrix left_nullspace(const ExprMatrix& m) {
    const std::size_t R = m.rows(), C = m.cols();
    ExprMatrix aug(R, C + R);
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < C; ++j) aug(i, j) = m(i, j);
        aug(i, C + i) = Expr(1);
    }
    std::vector<std::size_t> cols(C);
    std::iota(cols.begin(), cols.end(), 0);
    Rref r = rref(aug, cols);
    std::vector<std::size_t> tail(R);
    std::iota(tail.begin(), tail.end(), C);
    ExprMatrix out(0, R);
    for (std::size_t i = r.rank(); i < R; ++i) {
        std::vector<Expr> v(R);
        for (std::size_t j = 0; j < R; ++j) v[j] = r.reduced(i, C + j);
        out.append_row(v);
    }
    // Tidy the basis itself.
    if (out.rows() > 1) {
        Rref t = rref(out);
        ExprMatrix tidy(0, R);
        for (std::size_t i = 0; i < t.rank(); ++i) tidy.append_row(t.reduced.row(i));
        return tidy;
    }
    return out;
}

// ------------------------------------------------------------ solve_for

namespace {

std::string var_list(const std::vector<Var>& vs) {
    std::string s;
    for (Var v : vs) s += (s.empty() ? "" : ", ") + var_name(v);
    return s;
}

void add_guard(std::vector<Expr>& guards, const Expr& g) {
    if (g.is_constant()) return;
    Expr n = Expr::polynomial(g.num().monic());
    if (std::find(guards.begin(), guards.end(), n) == guards.end()) guards.push_back(n);
    if (!g.den().is_constant()) {
        Expr d = Expr::polynomial(g.den().monic());
        if (std::find(guards.begin(), guards.end(), d) == guards.end()) guards.push_back(d);
    }
}

std::optional<Expr> solve_single(const Expr& eq, Var u, std::vector<Expr>& guards) {
    if (eq.den().contains(u)) {
        // eq = 0 iff num = 0 where den does not vanish.
        auto v = solve_single(Expr::polynomial(eq.num()), u, guards);
        if (v) add_guard(guards, Expr::polynomial(eq.den()));
        return v;
    }
    Expr d = differentiate(eq, u);
    if (d.is_zero()) return std::nullopt;
    if (!d.depends_on(u)) {
        Expr rest = substitute(eq, {{u, Expr(0)}});
        add_guard(guards, d);
        return -rest / d;
    }
    // c*u^k + rest with c, rest free of u: u = (-rest/c)^(1/k).
    if (eq.den().contains(u)) return std::nullopt;
    for (Var a : eq.atoms())
        if (a != u && !KernelTable::instance().is_symbol(a) && KernelTable::instance().info(a).arg->depends_on(u))
            return std::nullopt;
    auto coeffs = eq.num().coefficients_in(u);
    std::size_t k = 0;
    for (std::size_t i = 1; i < coeffs.size(); ++i) {
        if (coeffs[i].is_zero()) continue;
        if (k != 0) return std::nullopt;
        k = i;
    }
    if (k == 0) return std::nullopt;
    Expr c = Expr::fraction(coeffs[k], eq.den());
    Expr rest = Expr::fraction(coeffs[0], eq.den());
    add_guard(guards, c);
    return (-rest / c).pow(Rational(1, static_cast<long>(k)));
}

}  // namespace

Solution solve_for(const std::vector<Expr>& equations, const std::vector<Var>& unknowns) {
    if (equations.size() != unknowns.size())
        throw SolveError("solve_for needs as many equations as unknowns (" + std::to_string(equations.size()) +
                         " vs " + std::to_string(unknowns.size()) + ")");
    Solution sol;
    std::vector<Expr> pending = equations;
    std::vector<Var> open = unknowns;

    auto record = [&](Var u, const Expr& value) {
        Bindings b{{u, value}};
        for (auto& [_, v] : sol.values) v = substitute(v, b);
        for (auto& e : pending) e = substitute(e, b);
        sol.values[u] = value;
        open.erase(std::find(open.begin(), open.end(), u));
    };

    while (!open.empty()) {
        bool progress = false;
        for (std::size_t i = 0; i < pending.size() && !progress; ++i) {
            std::vector<Var> present;
            for (Var u : open)
                if (pending[i].depends_on(u)) present.push_back(u);
            if (present.size() != 1) continue;
            auto value = solve_single(pending[i], present[0], sol.guards);
            if (!value) continue;
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(i));
            record(present[0], *value);
            progress = true;
        }
        if (progress) continue;

        // Joint affine system in the remaining unknowns.
        std::vector<Expr> live;
        for (const auto& e : pending) {
            bool any = false;
            bool in_den = false;
            for (Var u : open) {
                any = any || e.depends_on(u);
                in_den = in_den || e.den().contains(u);
            }
            if (!any) continue;
            if (in_den) {
                add_guard(sol.guards, Expr::polynomial(e.den()));
                live.push_back(Expr::polynomial(e.num()));
            } else {
                live.push_back(e);
            }
        }
        if (live.size() < open.size())
            throw SolveError("underdetermined: no equation left for " + var_list(open));
        ExprMatrix a(live.size(), open.size() + 1);
        Bindings zero;
        for (Var u : open) zero[u] = Expr(0);
        for (std::size_t i = 0; i < live.size(); ++i) {
            for (std::size_t j = 0; j < open.size(); ++j) {
                Expr c = differentiate(live[i], open[j]);
                for (Var u : open)
                    if (c.depends_on(u))
                        throw SolveError("equation is not solvable in closed form: " + live[i].to_string() + " = 0");
                a(i, j) = c;
            }
            a(i, open.size()) = -substitute(live[i], zero);
        }
        std::vector<std::size_t> cols(open.size());
        std::iota(cols.begin(), cols.end(), 0);
        Rref r = rref(a, cols);
        if (r.rank() < open.size())
            throw SolveError("singular linear system in " + var_list(open) + ": determinant vanishes identically");
        for (std::size_t i = r.rank(); i < live.size(); ++i)
            if (!r.reduced(i, open.size()).is_zero())
                throw SolveError("inconsistent linear system in " + var_list(open));
        std::vector<std::pair<Var, Expr>> vals;
        for (std::size_t i = 0; i < r.rank(); ++i) vals.emplace_back(open[r.pivot_cols[i]], r.reduced(i, open.size()));
        pending.clear();
        for (auto& [u, v] : vals) {
            add_guard(sol.guards, Expr::polynomial(v.den()));
            record(u, v);
        }
    }
    for (auto& g : sol.guards) g = substitute(g, sol.values);
    std::vector<Expr> guards;
    for (const auto& g : sol.guards) add_guard(guards, g);
    sol.guards = std::move(guards);
    return sol;
}

}  // namespace sflat
