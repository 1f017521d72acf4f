#include "sflat/symbolic/expr.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace sflat {

namespace {

const KernelInfo& kinfo(Var v) { return KernelTable::instance().info(v); }

bool is_cos_kernel(Var v) {
    const auto& k = kinfo(v);
    return !k.is_symbol && k.func == Func::Cos;
}

bool is_pow_kernel(Var v) {
    const auto& k = kinfo(v);
    return !k.is_symbol && k.func == Func::Pow;
}

/// True when a term carries cos(a)^k, k >= 2, or a fractional power whose
/// accumulated exponent reaches 1; both are rewritten by `reduce_kernels`.
bool needs_kernel_rewrite(const Poly& p) {
    for (const auto& t : p.terms()) {
        for (const auto& [v, e] : t.mono) {
            if (e < 2 && !is_pow_kernel(v)) continue;
            if (is_cos_kernel(v) && e >= 2) return true;
            if (is_pow_kernel(v) && kinfo(v).exponent * e >= 1) return true;
        }
    }
    return false;
}

Expr reduce_kernels(const Poly& p) {
    Expr sum(0);
    for (const auto& t : p.terms()) {
        Expr term(t.coeff);
        Monomial kept;
        for (const auto& [v, e] : t.mono) {
            const KernelInfo& k = kinfo(v);
            if (!k.is_symbol && k.func == Func::Cos && e >= 2) {
                Expr s = sin(*k.arg);
                Expr r = (Expr(1) - s * s).pow(static_cast<long>(e / 2));
                if (e % 2 == 1) r = r * Expr::variable(v);
                term = term * r;
            } else if (!k.is_symbol && k.func == Func::Pow && k.exponent * e >= 1) {
                Rational total = k.exponent * e;
                mpz_class whole = total.get_num() / total.get_den();
                Rational frac = total - Rational(whole);
                Expr r = k.arg->pow(static_cast<long>(whole.get_si()));
                if (frac != 0) r = r * Expr::variable(KernelTable::instance().function(Func::Pow, *k.arg, frac));
                term = term * r;
            } else {
                kept.emplace_back(v, e);
            }
        }
        if (!kept.empty()) term = term * Expr::polynomial(Poly(1).mul_monomial(kept, Rational(1)));
        sum = sum + term;
    }
    return sum;
}

bool looks_negative(const Expr& e) { return !e.is_zero() && e.num().leading().coeff < 0; }

}  // namespace

Expr Expr::variable(Var v) {
    Expr e;
    e.num_ = Poly::variable(v);
    e.den_ = Poly(1);
    return e;
}

Expr Expr::from_reduced(Poly num, Poly den) {
    if (den.is_zero()) throw std::domain_error("division by zero");
    if (num.is_zero()) return Expr(0);
    if (needs_kernel_rewrite(num) || needs_kernel_rewrite(den)) return fraction(num, den);
    Rational lc = den.leading().coeff;
    if (lc != 1) {
        num = num.scaled(Rational(1) / lc);
        den = den.scaled(Rational(1) / lc);
    }
    Expr e;
    e.num_ = std::move(num);
    e.den_ = std::move(den);
    return e;
}

Expr Expr::fraction(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw std::domain_error("division by zero");
    if (num.is_zero()) return Expr(0);
    if (needs_kernel_rewrite(num) || needs_kernel_rewrite(den)) {
        Expr n = reduce_kernels(num);
        Expr d = reduce_kernels(den);
        return n / d;
    }
    Expr e;
    if (den.is_constant()) {
        e.num_ = num.scaled(Rational(1) / den.leading().coeff);
        e.den_ = Poly(1);
        return e;
    }
    Poly g = gcd(num, den);
    Poly n = num, d = den;
    if (!g.is_constant()) {
        n = *num.divide_exact(g);
        d = *den.divide_exact(g);
    }
    Rational lc = d.leading().coeff;
    if (lc != 1) {
        n = n.scaled(Rational(1) / lc);
        d = d.scaled(Rational(1) / lc);
    }
    e.num_ = std::move(n);
    e.den_ = std::move(d);
    return e;
}

Rational Expr::constant_value() const {
    if (!is_constant()) throw std::logic_error("expression is not constant: " + to_string());
    return num_.constant_value() / den_.constant_value();
}

std::set<Var> Expr::atoms() const {
    std::set<Var> out = num_.vars();
    for (Var v : den_.vars()) out.insert(v);
    return out;
}

std::set<Var> Expr::free_symbols() const {
    std::set<Var> out;
    for (Var v : atoms()) {
        const KernelInfo& k = kinfo(v);
        if (k.is_symbol) {
            out.insert(v);
        } else {
            for (Var w : k.arg->free_symbols()) out.insert(w);
        }
    }
    return out;
}

bool Expr::depends_on(Var v) const {
    for (Var a : atoms()) {
        if (a == v) return true;
        const KernelInfo& k = kinfo(a);
        if (!k.is_symbol && k.arg->depends_on(v)) return true;
    }
    return false;
}

bool Expr::has_kernels() const {
    for (Var a : atoms())
        if (!kinfo(a).is_symbol) return true;
    return false;
}

Expr Expr::operator-() const {
    Expr e = *this;
    e.num_ = -e.num_;
    return e;
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_.is_one() && b.den_.is_one()) {
        Expr e;
        e.num_ = a.num_ + b.num_;
        if (needs_kernel_rewrite(e.num_)) return Expr::fraction(e.num_, Poly(1));
        return e;
    }
    if (a.den_ == b.den_) return Expr::fraction(a.num_ + b.num_, a.den_);
    if (a.den_.is_one()) return Expr::fraction(a.num_ * b.den_ + b.num_, b.den_);
    if (b.den_.is_one()) return Expr::fraction(a.num_ + b.num_ * a.den_, a.den_);
    Poly g = gcd(a.den_, b.den_);
    Poly ca = *b.den_.divide_exact(g);  // cofactor applied to a
    Poly cb = *a.den_.divide_exact(g);
    return Expr::fraction(a.num_ * ca + b.num_ * cb, a.den_ * ca);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return Expr(0);
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    Poly an = a.num_, ad = a.den_, bn = b.num_, bd = b.den_;
    if (!bd.is_one()) {
        Poly g = gcd(an, bd);
        if (!g.is_constant()) {
            an = *an.divide_exact(g);
            bd = *bd.divide_exact(g);
        }
    }
    if (!ad.is_one()) {
        Poly g = gcd(bn, ad);
        if (!g.is_constant()) {
            bn = *bn.divide_exact(g);
            ad = *ad.divide_exact(g);
        }
    }
    return Expr::from_reduced(an * bn, ad * bd);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("division by zero expression");
    return a * Expr::from_reduced(b.den_, b.num_);
}

Expr Expr::pow(long n) const {
    if (n == 0) return Expr(1);
    if (n < 0) return Expr(1) / pow(-n);
    if (n == 1) return *this;
    return Expr::fraction(num_.pow(static_cast<unsigned>(n)), den_.pow(static_cast<unsigned>(n)));
}

namespace {

std::optional<Rational> exact_root(const Rational& value, const Rational& r) {
    // value^(p/q) for rational value when the q-th root is exact.
    if (value < 0) return std::nullopt;
    const unsigned long q = r.get_den().get_ui();
    mpz_class rn, rd;
    mpz_root(rn.get_mpz_t(), value.get_num().get_mpz_t(), q);
    mpz_root(rd.get_mpz_t(), value.get_den().get_mpz_t(), q);
    mpz_class chk_n, chk_d;
    mpz_pow_ui(chk_n.get_mpz_t(), rn.get_mpz_t(), q);
    mpz_pow_ui(chk_d.get_mpz_t(), rd.get_mpz_t(), q);
    if (chk_n != value.get_num() || chk_d != value.get_den()) return std::nullopt;
    Rational root(rn, rd);
    root.canonicalize();
    long p = r.get_num().get_si();
    Rational out(1);
    for (long i = 0; i < std::labs(p); ++i) out *= root;
    if (p < 0) out = Rational(1) / out;
    return out;
}

}  // namespace

Expr Expr::pow(const Rational& r) const {
    if (r.get_den() == 1) return pow(r.get_num().get_si());
    if (is_zero()) {
        if (r < 0) throw std::domain_error("zero raised to a negative power");
        return Expr(0);
    }
    if (is_constant()) {
        if (auto v = exact_root(constant_value(), r)) return Expr(*v);
    }
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    Rational frac = r - Rational(fl);
    Expr k = Expr::variable(KernelTable::instance().function(Func::Pow, *this, frac));
    return pow(fl.get_si()) * k;
}

std::string Expr::to_string() const {
    if (den_.is_one()) return num_.to_string();
    std::string n = num_.to_string();
    if (num_.size() > 1) n = "(" + n + ")";
    std::string d = den_.to_string();
    bool single_var = den_.size() == 1 && den_.leading().coeff == 1 && den_.leading().mono.size() == 1;
    if (!single_var) d = "(" + d + ")";
    return n + "/" + d;
}

Expr apply(Func f, const Expr& a) {
    switch (f) {
        case Func::Sin:
            if (a.is_zero()) return Expr(0);
            if (looks_negative(a)) return -apply(Func::Sin, -a);
            break;
        case Func::Cos:
            if (a.is_zero()) return Expr(1);
            if (looks_negative(a)) return apply(Func::Cos, -a);
            break;
        case Func::Tan:
            if (a.is_zero()) return Expr(0);
            if (looks_negative(a)) return -apply(Func::Tan, -a);
            break;
        case Func::Exp:
            if (a.is_zero()) return Expr(1);
            break;
        case Func::Log:
            if (a.is_one()) return Expr(0);
            if (a.is_zero()) throw std::domain_error("log(0)");
            break;
        case Func::Pow:
            return a.pow(Rational(1, 2));
    }
    return Expr::variable(KernelTable::instance().function(f, a));
}

Expr sin(const Expr& e) { return apply(Func::Sin, e); }
Expr cos(const Expr& e) { return apply(Func::Cos, e); }
Expr tan(const Expr& e) { return apply(Func::Tan, e); }
Expr exp(const Expr& e) { return apply(Func::Exp, e); }
Expr log(const Expr& e) { return apply(Func::Log, e); }
Expr sqrt(const Expr& e) { return e.pow(Rational(1, 2)); }

// ------------------------------------------------------------ calculus

namespace {

Expr kernel_derivative(Var k, Var s) {
    const KernelInfo& info = kinfo(k);
    const Expr& a = *info.arg;
    Expr da = differentiate(a, s);
    if (da.is_zero()) return Expr(0);
    switch (info.func) {
        case Func::Sin: return cos(a) * da;
        case Func::Cos: return -sin(a) * da;
        case Func::Tan: {
            Expr t = Expr::variable(k);
            return (Expr(1) + t * t) * da;
        }
        case Func::Exp: return Expr::variable(k) * da;
        case Func::Log: return da / a;
        case Func::Pow: return Expr(info.exponent) * Expr::variable(k) * da / a;
    }
    return Expr(0);
}

Expr poly_derivative(const Poly& p, Var s) {
    Expr out = Expr::polynomial(p.partial(s));
    for (Var v : p.vars()) {
        const KernelInfo& k = kinfo(v);
        if (k.is_symbol || !k.arg->depends_on(s)) continue;
        out = out + Expr::polynomial(p.partial(v)) * kernel_derivative(v, s);
    }
    return out;
}

}  // namespace

Expr differentiate(const Expr& e, Var s) {
    if (!e.depends_on(s)) return Expr(0);
    Expr dn = poly_derivative(e.num(), s);
    if (e.den().is_one()) return dn;
    Expr den = Expr::polynomial(e.den());
    Expr dd = poly_derivative(e.den(), s);
    if (dd.is_zero()) return dn / den;
    if (dd.is_polynomial() && dn.is_polynomial()) {
        // With g = gcd(d, d') and h = d/g, (n/d)' = (n' h - n d'/g) / (g h^2).
        // Any common factor divides g or h, so only those small gcds are needed.
        const Poly dp = dd.num();
        const Poly g = gcd(e.den(), dp);
        const Poly h = *e.den().divide_exact(g);
        Poly num = dn.num() * h - e.num() * *dp.divide_exact(g);
        Poly den = e.den() * h;
        for (Poly part : {h, g, h}) {
            while (!part.is_constant() && !num.is_zero()) {
                Poly c = gcd(num, part);
                if (c.is_constant()) break;
                num = *num.divide_exact(c);
                den = *den.divide_exact(c);
                part = *part.divide_exact(c);
            }
        }
        if (num.is_zero()) return Expr(0);
        return Expr::from_reduced(std::move(num), std::move(den));
    }
    return (dn * den - Expr::polynomial(e.num()) * dd) / (den * den);
}

namespace {

struct Substituter {
    const Bindings& bindings;
    std::unordered_map<Var, Expr> cache;

    const Expr& value(Var v) {
        auto it = cache.find(v);
        if (it != cache.end()) return it->second;
        Expr val;
        auto b = bindings.find(v);
        if (b != bindings.end()) {
            val = b->second;
        } else {
            const KernelInfo& k = kinfo(v);
            if (!k.is_symbol && touches(*k.arg)) {
                Expr arg = substitute(*k.arg, bindings);
                val = k.func == Func::Pow ? arg.pow(k.exponent) : apply(k.func, arg);
            } else {
                val = Expr::variable(v);
            }
        }
        return cache.emplace(v, std::move(val)).first->second;
    }

    bool touches(const Expr& e) const {
        for (const auto& [v, _] : bindings)
            if (e.depends_on(v)) return true;
        return false;
    }

    Expr poly(const Poly& p) {
        // Polynomial bindings let the whole numerator be substituted at the
        // Poly level, which avoids a gcd per partial product.
        std::map<Var, Poly> poly_repl;
        bool all_poly = true;
        for (Var v : p.vars()) {
            const Expr& val = value(v);
            if (val == Expr::variable(v)) continue;
            if (!val.den().is_one()) {
                all_poly = false;
                break;
            }
            poly_repl.emplace(v, val.num());
        }
        if (all_poly) return Expr::polynomial(p.substitute(poly_repl));
        Expr sum(0);
        for (const auto& t : p.terms()) {
            Expr term(t.coeff);
            for (const auto& [v, e] : t.mono) term = term * value(v).pow(static_cast<long>(e));
            sum = sum + term;
        }
        return sum;
    }
};

}  // namespace

Expr substitute(const Expr& e, const Bindings& bindings) {
    if (bindings.empty()) return e;
    bool touched = false;
    for (const auto& [v, _] : bindings) {
        if (e.depends_on(v)) {
            touched = true;
            break;
        }
    }
    if (!touched) return e;
    Substituter sub{bindings, {}};
    Expr n = sub.poly(e.num());
    if (e.den().is_one()) return n;
    return n / sub.poly(e.den());
}

// ------------------------------------------------------------ evaluation

void Point::set(Var v, double value) {
    if (v >= values_.size()) {
        values_.resize(v + 1, 0.0);
        present_.resize(v + 1, false);
    }
    values_[v] = value;
    present_[v] = true;
    exact_.erase(v);
}

void Point::set_exact(Var v, const Rational& value) {
    set(v, value.get_d());
    exact_[v] = value;
}

const Rational* Point::exact(Var v) const {
    auto it = exact_.find(v);
    return it == exact_.end() ? nullptr : &it->second;
}

std::vector<Var> Point::vars() const {
    std::vector<Var> out;
    for (Var v = 0; v < present_.size(); ++v)
        if (present_[v]) out.push_back(v);
    return out;
}

std::map<std::string, std::string> Point::describe() const {
    std::map<std::string, std::string> out;
    for (Var v : vars()) {
        if (const Rational* r = exact(v))
            out[var_name(v)] = r->get_str();
        else
            out[var_name(v)] = std::to_string(values_[v]);
    }
    return out;
}

namespace {

struct DoubleEval {
    const Point& point;
    std::unordered_map<Var, std::optional<double>> kernels;

    std::optional<double> var(Var v) {
        if (point.has(v)) return point.get(v);
        const KernelInfo& k = kinfo(v);
        if (k.is_symbol) return std::nullopt;
        auto it = kernels.find(v);
        if (it != kernels.end()) return it->second;
        std::optional<double> out;
        auto a = eval(*k.arg);
        if (a) {
            double x = *a;
            switch (k.func) {
                case Func::Sin: out = std::sin(x); break;
                case Func::Cos: out = std::cos(x); break;
                case Func::Tan: out = std::tan(x); break;
                case Func::Exp: out = std::exp(x); break;
                case Func::Log:
                    if (x > 0) out = std::log(x);
                    break;
                case Func::Pow:
                    if (x >= 0) out = std::pow(x, k.exponent.get_d());
                    break;
            }
        }
        if (out && !std::isfinite(*out)) out.reset();
        kernels.emplace(v, out);
        return out;
    }

    std::optional<double> poly(const Poly& p) {
        double sum = 0.0;
        for (const auto& t : p.terms()) {
            double term = t.coeff.get_d();
            for (const auto& [v, e] : t.mono) {
                auto x = var(v);
                if (!x) return std::nullopt;
                term *= e == 1 ? *x : std::pow(*x, static_cast<double>(e));
            }
            sum += term;
        }
        return sum;
    }

    std::optional<double> eval(const Expr& e) {
        auto n = poly(e.num());
        if (!n) return std::nullopt;
        if (e.den().is_one()) return std::isfinite(*n) ? n : std::nullopt;
        auto d = poly(e.den());
        if (!d || *d == 0.0) return std::nullopt;
        double r = *n / *d;
        if (!std::isfinite(r)) return std::nullopt;
        return r;
    }
};

std::optional<Rational> exact_poly(const Poly& p, const Point& point) {
    Rational sum(0);
    for (const auto& t : p.terms()) {
        Rational term = t.coeff;
        for (const auto& [v, e] : t.mono) {
            const Rational* x = point.exact(v);
            if (!x) return std::nullopt;
            Rational pw(1);
            for (unsigned i = 0; i < e; ++i) pw *= *x;
            term *= pw;
        }
        sum += term;
    }
    return sum;
}

}  // namespace

std::optional<double> evaluate(const Expr& e, const Point& p) {
    DoubleEval ev{p, {}};
    return ev.eval(e);
}

std::optional<Rational> evaluate_exact(const Expr& e, const Point& p) {
    auto n = exact_poly(e.num(), p);
    if (!n) return std::nullopt;
    auto d = exact_poly(e.den(), p);
    if (!d || *d == 0) return std::nullopt;
    return *n / *d;
}

}  // namespace sflat
