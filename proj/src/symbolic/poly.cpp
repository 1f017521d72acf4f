#include "sflat/symbolic/poly.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sflat {

unsigned total_degree(const Monomial& m) {
    unsigned d = 0;
    for (const auto& [v, e] : m) d += e;
    return d;
}

int monomial_compare(const Monomial& a, const Monomial& b) {
    const unsigned da = total_degree(a);
    const unsigned db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) return 1;
        if (i == a.size() || b[j].first < a[i].first) return -1;
        if (a[i].second != b[j].second) return a[i].second < b[j].second ? -1 : 1;
        ++i;
        ++j;
    }
    return 0;
}

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

std::optional<Monomial> monomial_div(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0;
    for (const auto& [v, e] : b) {
        while (i < a.size() && a[i].first < v) out.push_back(a[i++]);
        if (i == a.size() || a[i].first != v || a[i].second < e) return std::nullopt;
        if (a[i].second > e) out.emplace_back(v, a[i].second - e);
        ++i;
    }
    while (i < a.size()) out.push_back(a[i++]);
    return out;
}

unsigned monomial_exponent(const Monomial& m, Var v) {
    for (const auto& [w, e] : m)
        if (w == v) return e;
    return 0;
}

namespace {

struct DescendingMonomial {
    bool operator()(const Monomial& a, const Monomial& b) const { return monomial_compare(a, b) > 0; }
};

using TermMap = std::map<Monomial, Rational, DescendingMonomial>;

Poly from_map(TermMap&& map) {
    std::vector<Term> terms;
    terms.reserve(map.size());
    for (auto& [m, c] : map)
        if (c != 0) terms.push_back(Term{m, c});
    return Poly::from_terms(std::move(terms));
}

}  // namespace

Poly::Poly(const Rational& c) {
    if (c == 0) return;
    Rational r = c;
    r.canonicalize();
    terms_.push_back(Term{{}, std::move(r)});
}

Poly Poly::variable(Var v, unsigned exponent) {
    Poly p;
    if (exponent == 0) return Poly(1);
    p.terms_.push_back(Term{{{v, exponent}}, Rational(1)});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return monomial_compare(a.mono, b.mono) > 0; });
    Poly p;
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
            p.terms_.back().coeff += t.coeff;
        } else {
            if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
            p.terms_.push_back(std::move(t));
        }
    }
    if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
    return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.empty()); }

bool Poly::is_one() const { return terms_.size() == 1 && terms_[0].mono.empty() && terms_[0].coeff == 1; }

Rational Poly::constant_value() const {
    if (!terms_.empty() && terms_.back().mono.empty()) return terms_.back().coeff;
    return Rational(0);
}

unsigned Poly::degree() const { return terms_.empty() ? 0 : total_degree(terms_.front().mono); }

unsigned Poly::degree_in(Var v) const {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, monomial_exponent(t.mono, v));
    return d;
}

std::set<Var> Poly::vars() const {
    std::set<Var> out;
    for (const auto& t : terms_)
        for (const auto& [v, e] : t.mono) out.insert(v);
    return out;
}

bool Poly::contains(Var v) const {
    for (const auto& t : terms_)
        if (monomial_exponent(t.mono, v) > 0) return true;
    return false;
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& t : p.terms_) t.coeff = -t.coeff;
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Poly out;
    out.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
        int c;
        if (i == a.terms_.size())
            c = -1;
        else if (j == b.terms_.size())
            c = 1;
        else
            c = monomial_compare(a.terms_[i].mono, b.terms_[j].mono);
        if (c > 0) {
            out.terms_.push_back(a.terms_[i++]);
        } else if (c < 0) {
            out.terms_.push_back(b.terms_[j++]);
        } else {
            Rational s = a.terms_[i].coeff + b.terms_[j].coeff;
            if (s != 0) out.terms_.push_back(Term{a.terms_[i].mono, s});
            ++i;
            ++j;
        }
    }
    return out;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    if (a.is_constant()) return b.scaled(a.terms_[0].coeff);
    if (b.is_constant()) return a.scaled(b.terms_[0].coeff);
    if (a.terms_.size() == 1) return b.mul_monomial(a.terms_[0].mono, a.terms_[0].coeff);
    if (b.terms_.size() == 1) return a.mul_monomial(b.terms_[0].mono, b.terms_[0].coeff);
    TermMap acc;
    for (const auto& ta : a.terms_)
        for (const auto& tb : b.terms_) acc[monomial_mul(ta.mono, tb.mono)] += ta.coeff * tb.coeff;
    return from_map(std::move(acc));
}

Poly Poly::scaled(const Rational& c) const {
    if (c == 0) return Poly();
    Poly p = *this;
    for (auto& t : p.terms_) t.coeff *= c;
    return p;
}

Poly Poly::mul_monomial(const Monomial& m, const Rational& c) const {
    if (c == 0) return Poly();
    Poly p;
    p.terms_.reserve(terms_.size());
    // Multiplying by a monomial preserves the term order.
    for (const auto& t : terms_) p.terms_.push_back(Term{monomial_mul(t.mono, m), t.coeff * c});
    return p;
}

Poly Poly::pow(unsigned n) const {
    Poly result(1);
    Poly base = *this;
    while (n > 0) {
        if (n & 1U) result = result * base;
        n >>= 1U;
        if (n > 0) base = base * base;
    }
    return result;
}

Poly Poly::partial(Var v) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
        unsigned e = monomial_exponent(t.mono, v);
        if (e == 0) continue;
        Monomial m;
        for (const auto& [w, ew] : t.mono) {
            if (w != v)
                m.emplace_back(w, ew);
            else if (ew > 1)
                m.emplace_back(w, ew - 1);
        }
        out.push_back(Term{std::move(m), t.coeff * e});
    }
    return from_terms(std::move(out));
}

std::vector<Poly> Poly::coefficients_in(Var v) const {
    std::vector<std::vector<Term>> buckets(degree_in(v) + 1);
    for (const auto& t : terms_) {
        unsigned e = 0;
        Monomial m;
        for (const auto& [w, ew] : t.mono) {
            if (w == v)
                e = ew;
            else
                m.emplace_back(w, ew);
        }
        buckets[e].push_back(Term{std::move(m), t.coeff});
    }
    std::vector<Poly> out;
    out.reserve(buckets.size());
    for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
    return out;
}

Poly Poly::from_coefficients(const std::vector<Poly>& coeffs, Var v) {
    std::vector<Term> terms;
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
        for (const auto& t : coeffs[d].terms_) {
            if (d == 0) {
                terms.push_back(t);
            } else {
                terms.push_back(Term{monomial_mul(t.mono, Monomial{{v, static_cast<unsigned>(d)}}), t.coeff});
            }
        }
    }
    return from_terms(std::move(terms));
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    if (is_zero()) return Poly();
    if (d.is_constant()) return scaled(Rational(1) / d.terms_[0].coeff);
    if (d.terms_.size() == 1) {
        Poly q;
        for (const auto& t : terms_) {
            auto m = monomial_div(t.mono, d.terms_[0].mono);
            if (!m) return std::nullopt;
            q.terms_.push_back(Term{std::move(*m), t.coeff / d.terms_[0].coeff});
        }
        return q;
    }
    if (degree() < d.degree()) return std::nullopt;
    Poly r = *this;
    std::vector<Term> q;
    const Term& ld = d.terms_.front();
    while (!r.is_zero()) {
        auto m = monomial_div(r.terms_.front().mono, ld.mono);
        if (!m) return std::nullopt;
        Rational c = r.terms_.front().coeff / ld.coeff;
        r = r - d.mul_monomial(*m, c);
        q.push_back(Term{std::move(*m), c});
    }
    return from_terms(std::move(q));
}

Rational Poly::content() const {
    if (terms_.empty()) return Rational(0);
    mpz_class num = terms_[0].coeff.get_num();
    mpz_class den = terms_[0].coeff.get_den();
    for (std::size_t i = 1; i < terms_.size(); ++i) {
        num = gcd(num, mpz_class(terms_[i].coeff.get_num()));
        den = lcm(den, mpz_class(terms_[i].coeff.get_den()));
    }
    if (num < 0) num = -num;
    Rational c(num, den);
    c.canonicalize();
    return c;
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return scaled(Rational(1) / terms_.front().coeff);
}

Poly Poly::substitute(const std::map<Var, Poly>& repl) const {
    bool touched = false;
    for (const auto& t : terms_) {
        for (const auto& [v, e] : t.mono)
            if (repl.count(v)) touched = true;
        if (touched) break;
    }
    if (!touched) return *this;
    Poly out;
    std::map<std::pair<Var, unsigned>, Poly> powers;
    for (const auto& t : terms_) {
        Poly term(t.coeff);
        Monomial kept;
        for (const auto& [v, e] : t.mono) {
            auto it = repl.find(v);
            if (it == repl.end()) {
                kept.emplace_back(v, e);
                continue;
            }
            auto key = std::make_pair(v, e);
            auto pit = powers.find(key);
            if (pit == powers.end()) pit = powers.emplace(key, it->second.pow(e)).first;
            term = term * pit->second;
        }
        if (!kept.empty()) term = term.mul_monomial(kept, Rational(1));
        out = out + term;
    }
    return out;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        if (a.terms_[i].coeff != b.terms_[i].coeff || a.terms_[i].mono != b.terms_[i].mono) return false;
    }
    return true;
}

std::string monomial_to_string(const Monomial& m) {
    std::string out;
    for (const auto& [v, e] : m) {
        if (!out.empty()) out += "*";
        const KernelInfo& info = KernelTable::instance().info(v);
        bool wrap = !info.is_symbol && info.func == Func::Pow && info.exponent != Rational(1, 2);
        if (wrap && e > 1) {
            out += "(" + info.name + ")";
        } else {
            out += info.name;
        }
        if (e > 1) out += "^" + std::to_string(e);
    }
    return out;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& t : terms_) {
        Rational c = t.coeff;
        bool neg = c < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        first = false;
        if (t.mono.empty()) {
            out += c.get_str();
        } else if (c == 1) {
            out += monomial_to_string(t.mono);
        } else {
            out += c.get_str() + "*" + monomial_to_string(t.mono);
        }
    }
    return out;
}

// ---------------------------------------------------------------- gcd

namespace {

Poly content_in(const Poly& p, Var v);

Poly primitive_part_in(const Poly& p, Var v) {
    Poly c = content_in(p, v);
    auto q = p.divide_exact(c);
    if (!q) throw std::logic_error("content does not divide polynomial");
    return *q;
}

Poly scale_primitive(const Poly& p) {
    if (p.is_zero()) return p;
    Rational c = p.content();
    Poly q = p.scaled(Rational(1) / c);
    if (q.leading().coeff < 0) q = -q;
    return q;
}

/// Pseudo-remainder of a by b as polynomials in v.
Poly pseudo_remainder(const Poly& a, const Poly& b, Var v) {
    std::vector<Poly> ca = a.coefficients_in(v);
    const std::vector<Poly> cb = b.coefficients_in(v);
    const std::size_t db = cb.size() - 1;
    const Poly& lcb = cb.back();
    auto is_zero_vec = [&] { return ca.size() == 1 && ca[0].is_zero(); };
    while (!is_zero_vec() && ca.size() - 1 >= db) {
        const std::size_t shift = ca.size() - 1 - db;
        Poly lead = ca.back();
        for (auto& c : ca) c = c * lcb;
        for (std::size_t i = 0; i <= db; ++i) ca[i + shift] = ca[i + shift] - lead * cb[i];
        while (ca.size() > 1 && ca.back().is_zero()) ca.pop_back();
    }
    return Poly::from_coefficients(ca, v);
}

Poly content_in(const Poly& p, Var v) {
    auto coeffs = p.coefficients_in(v);
    Poly g;
    for (const auto& c : coeffs) {
        if (c.is_zero()) continue;
        g = gcd(g, c);
        if (g.is_constant()) return Poly(1);
    }
    return g.is_zero() ? Poly(1) : g;
}

Poly monomial_gcd(const Poly& single, const Poly& other) {
    Monomial m = single.leading().mono;
    for (const auto& t : other.terms()) {
        Monomial next;
        for (const auto& [v, e] : m) {
            unsigned f = monomial_exponent(t.mono, v);
            if (f > 0) next.emplace_back(v, std::min(e, f));
        }
        m = std::move(next);
        if (m.empty()) break;
    }
    return Poly(1).mul_monomial(m, Rational(1));
}

using Dense = std::vector<Rational>;

void trim(Dense& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

/// Image of p in Q[v] after substituting `point` for every other variable.
Dense image_in(const Poly& p, Var v, const std::map<Var, Rational>& point) {
    Dense out(p.degree_in(v) + 1);
    for (const auto& t : p.terms()) {
        Rational c = t.coeff;
        unsigned dv = 0;
        for (const auto& [w, e] : t.mono) {
            if (w == v) {
                dv = e;
                continue;
            }
            Rational x = point.at(w);
            for (unsigned i = 0; i < e; ++i) c *= x;
        }
        out[dv] += c;
    }
    trim(out);
    return out;
}

std::size_t dense_gcd_degree(Dense a, Dense b) {
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
        // a mod b
        const Rational inv = 1 / b.back();
        while (a.size() >= b.size() && !a.empty()) {
            const Rational f = a.back() * inv;
            const std::size_t shift = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
            a.pop_back();
            trim(a);
        }
        std::swap(a, b);
    }
    return a.empty() ? 0 : a.size() - 1;
}

/// True when gcd(a, b) certainly does not involve v: the images at a point
/// where both leading coefficients in v survive have a constant gcd.
bool gcd_free_of(const Poly& a, const Poly& b, Var v) {
    std::set<Var> others = a.vars();
    for (Var w : b.vars()) others.insert(w);
    others.erase(v);
    const unsigned da = a.degree_in(v), db = b.degree_in(v);
    std::uint64_t state = 0x9e3779b97f4a7c15ULL ^ v;
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::map<Var, Rational> point;
        for (Var w : others) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            point[w] = Rational(static_cast<long>((state >> 33) % 23) - 11);
        }
        Dense ia = image_in(a, v, point), ib = image_in(b, v, point);
        if (ia.size() != da + 1 || ib.size() != db + 1) continue;  // leading coefficient vanished
        return dense_gcd_degree(ia, ib) == 0;
    }
    return false;
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Poly(1);
    if (a == b) return a.monic();
    if (a.size() == 1) return monomial_gcd(a, b);
    if (b.size() == 1) return monomial_gcd(b, a);
    if (a.size() <= b.size()) {
        if (b.divide_exact(a)) return a.monic();
    } else {
        if (a.divide_exact(b)) return b.monic();
    }

    const std::set<Var> va = a.vars();
    const std::set<Var> vb = b.vars();
    for (Var v : va) {
        if (vb.count(v)) continue;
        Poly g = b;
        for (const auto& c : a.coefficients_in(v)) {
            if (c.is_zero()) continue;
            g = gcd(c, g);
            if (g.is_constant()) return Poly(1);
        }
        return g.monic();
    }
    for (Var v : vb) {
        if (va.count(v)) continue;
        Poly g = a;
        for (const auto& c : b.coefficients_in(v)) {
            if (c.is_zero()) continue;
            g = gcd(c, g);
            if (g.is_constant()) return Poly(1);
        }
        return g.monic();
    }

    // Variables absent from the gcd reduce the problem to the coefficients.
    for (Var w : va) {
        if (!gcd_free_of(a, b, w)) continue;
        std::vector<Poly> parts = a.coefficients_in(w);
        for (auto& c : b.coefficients_in(w)) parts.push_back(std::move(c));
        std::sort(parts.begin(), parts.end(), [](const Poly& x, const Poly& y) { return x.size() < y.size(); });
        Poly g;
        for (const auto& c : parts) {
            if (c.is_zero()) continue;
            g = gcd(g, c);
            if (g.is_constant()) return Poly(1);
        }
        return g.monic();
    }

    const Var v = *va.begin();
    const Poly ca = content_in(a, v);
    const Poly cb = content_in(b, v);
    Poly pa = scale_primitive(*a.divide_exact(ca));
    Poly pb = scale_primitive(*b.divide_exact(cb));
    const Poly c = gcd(ca, cb);
    if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
    Poly g;
    while (true) {
        Poly r = pseudo_remainder(pa, pb, v);
        if (r.is_zero()) {
            g = primitive_part_in(pb, v);
            break;
        }
        if (r.degree_in(v) == 0) {
            g = Poly(1);
            break;
        }
        pa = pb;
        pb = scale_primitive(primitive_part_in(r, v));
    }
    return (c * g).monic();
}

}  // namespace sflat
