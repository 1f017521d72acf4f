#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sflat/symbolic/symbol.hpp"

namespace sflat {

/// Sparse exponent vector, sorted by Var, no zero exponents.
using Monomial = std::vector<std::pair<Var, unsigned>>;

unsigned total_degree(const Monomial& m);
/// Graded lexicographic order (lower Var id is more significant). Returns <0, 0, >0.
int monomial_compare(const Monomial& a, const Monomial& b);
Monomial monomial_mul(const Monomial& a, const Monomial& b);
/// a / b if b divides a.
std::optional<Monomial> monomial_div(const Monomial& a, const Monomial& b);
unsigned monomial_exponent(const Monomial& m, Var v);

struct Term {
    Monomial mono;
    Rational coeff;
};

/// Multivariate polynomial over Q. Terms are kept sorted in decreasing
/// graded-lex order with nonzero coefficients, so structural equality is
/// polynomial equality.
class Poly {
public:
    Poly() = default;
    Poly(const Rational& c);  // NOLINT(implicit)
    Poly(long c) : Poly(Rational(c)) {}  // NOLINT(implicit)
    static Poly variable(Var v, unsigned exponent = 1);
    static Poly from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_one() const;
    Rational constant_value() const;  // coefficient of the unit monomial
    const Term& leading() const { return terms_.front(); }
    std::size_t size() const { return terms_.size(); }

    unsigned degree() const;
    unsigned degree_in(Var v) const;
    std::set<Var> vars() const;
    bool contains(Var v) const;

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Rational& c) const;
    Poly mul_monomial(const Monomial& m, const Rational& c) const;
    Poly pow(unsigned n) const;

    Poly partial(Var v) const;

    /// Coefficients as a polynomial in `v`: result[d] multiplies v^d.
    std::vector<Poly> coefficients_in(Var v) const;
    static Poly from_coefficients(const std::vector<Poly>& coeffs, Var v);

    /// Exact quotient when `d` divides *this; nullopt otherwise.
    std::optional<Poly> divide_exact(const Poly& d) const;

    /// gcd of all term coefficients as a positive rational (numerator gcd / denominator lcm).
    Rational content() const;
    /// Makes the leading coefficient 1.
    Poly monic() const;

    /// Replaces variables using `repl`; unmapped variables are kept.
    Poly substitute(const std::map<Var, Poly>& repl) const;

    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    std::string to_string() const;

private:
    std::vector<Term> terms_;
};

/// Greatest common divisor over Q[vars], normalized monic (1 for coprime input).
Poly gcd(const Poly& a, const Poly& b);

std::string monomial_to_string(const Monomial& m);

}  // namespace sflat
