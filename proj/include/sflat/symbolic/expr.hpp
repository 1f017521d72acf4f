#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sflat/symbolic/poly.hpp"
#include "sflat/symbolic/symbol.hpp"

namespace sflat {

/// Symbolic expression in canonical rational form num/den.
///
/// Indeterminates are interned symbols and transcendental kernels. The
/// canonical form cancels the polynomial gcd of numerator and denominator,
/// makes the denominator monic, rewrites cos(a)^2 as 1 - sin(a)^2 and folds
/// the parity of sin/cos/tan arguments. Two expressions are equal as values of
/// this normal form iff their numerators and denominators are identical.
class Expr {
public:
    Expr() = default;
    Expr(const Rational& c) : num_(c), den_(1) {}  // NOLINT(implicit)
    Expr(long c) : Expr(Rational(c)) {}            // NOLINT(implicit)
    Expr(int c) : Expr(Rational(c)) {}             // NOLINT(implicit)
    explicit Expr(const Symbol& s) : Expr(variable(s.var())) {}
    static Expr variable(Var v);
    static Expr symbol(const std::string& name) { return variable(var_of(name)); }
    /// Builds num/den and canonicalizes.
    static Expr fraction(const Poly& num, const Poly& den);
    static Expr polynomial(const Poly& p) { return fraction(p, Poly(1)); }
    /// num/den known to be coprime; skips the gcd.
    static Expr from_reduced(Poly num, Poly den);

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    bool is_polynomial() const { return den_.is_constant(); }
    Rational constant_value() const;  // valid when is_constant()

    /// Direct indeterminates of num and den (symbols and kernels).
    std::set<Var> atoms() const;
    /// Symbols the expression depends on, looking through kernel arguments.
    std::set<Var> free_symbols() const;
    bool depends_on(Var v) const;
    bool has_kernels() const;

    Expr operator-() const;
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    Expr pow(long n) const;
    /// Rational power; non-integer exponents become a power kernel.
    Expr pow(const Rational& r) const;

    friend bool operator==(const Expr& a, const Expr& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    /// Parseable canonical text.
    std::string to_string() const;

private:
    Poly num_;
    Poly den_ = Poly(1);
};

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.to_string(); }

Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);
Expr apply(Func f, const Expr& e);

/// Exact partial derivative with respect to a symbol.
Expr differentiate(const Expr& e, Var s);
inline Expr differentiate(const Expr& e, const Symbol& s) { return differentiate(e, s.var()); }

using Bindings = std::map<Var, Expr>;
/// Simultaneous substitution followed by canonicalization.
Expr substitute(const Expr& e, const Bindings& bindings);

/// Canonicalization is applied on construction; this returns the same value
/// and exists so callers can state idempotence explicitly.
inline Expr simplify(const Expr& e) { return e; }

/// Numeric values for symbols, indexed by Var.
class Point {
public:
    Point() = default;
    void set(Var v, double value);
    void set_exact(Var v, const Rational& value);
    bool has(Var v) const { return v < present_.size() && present_[v]; }
    double get(Var v) const { return values_[v]; }
    const Rational* exact(Var v) const;
    std::map<std::string, std::string> describe() const;
    std::vector<Var> vars() const;

private:
    std::vector<double> values_;
    std::vector<bool> present_;
    std::unordered_map<Var, Rational> exact_;
};

/// Double evaluation. nullopt at poles, outside function domains, when a
/// free symbol is unbound, or when the value is not finite.
std::optional<double> evaluate(const Expr& e, const Point& p);
/// Exact evaluation for kernel-free expressions with exact bindings.
std::optional<Rational> evaluate_exact(const Expr& e, const Point& p);

}  // namespace sflat
