#pragma once

#include <random>
#include <string>
#include <vector>

#include "sflat/flatness/multi_index.hpp"
#include "sflat/geometry/system_model.hpp"
#include "sflat/symbolic/parser.hpp"
#include "sflat/symbolic/zero_test.hpp"

namespace fixtures {

/// Chain lengths and offsets of a triangular three-input system.
struct Gtf3Dims {
    int k1 = 1, k2 = 1, k3 = 1;
    int delta = 0;  // (p3 - k3) - (p2 - k2)
    int e2 = 0;     // p2 - k2
    int d_rp = 1;   // r3 - p3
    int p2() const { return k2 + e2; }
    int p3() const { return k3 + delta + e2; }
    int r3() const { return p3() + d_rp; }
    int n() const { return k1 + p2() + r3(); }
    sflat::MultiIndex K() const { return {k1, k2, k3}; }
    sflat::MultiIndex R() const { return {k1 + r3() - k3, p2() + d_rp, r3()}; }
};

struct Gtf3Instance {
    Gtf3Dims dims;
    sflat::SystemModel sys;
    std::vector<sflat::Expr> phi;
    /// Expressions that must be nonzero (b coefficients and the regularity conditions).
    std::vector<sflat::Expr> regularity;
};

inline std::string zname(int chain, int i) { return "z" + std::to_string(chain) + "_" + std::to_string(i); }

/// Random triangular system of the given dims: each shaped row is
/// next + c*m + (1 + c'*m') w1 (+ w2 where allowed), with m, m' random
/// monomials in the variables the row may depend on.
class Gtf3Generator {
public:
    explicit Gtf3Generator(std::uint64_t seed) : rng_(seed) {}

    Gtf3Dims random_dims(int max_n = 8) {
        for (;;) {
            Gtf3Dims d;
            d.k1 = uniform(1, 2);
            d.k2 = uniform(1, 2);
            d.k3 = uniform(1, 2);
            d.delta = uniform(0, 2);
            d.e2 = uniform(0, 1);
            d.d_rp = uniform(1, 2);
            if (d.n() <= max_n) return d;
        }
    }

    Gtf3Instance make(const Gtf3Dims& d) {
        using sflat::Expr;
        Gtf3Instance out;
        out.dims = d;
        const int len[3] = {d.k1, d.p2(), d.r3()};
        std::vector<std::string> states, dyn;
        for (int c = 1; c <= 3; ++c)
            for (int i = 1; i <= len[c - 1]; ++i) states.push_back(zname(c, i));
        std::vector<std::string> rows;
        auto z = [&](int c, int i) { return zname(c, i); };
        auto bar = [&](int c, int upto) {
            std::vector<std::string> v;
            for (int i = 1; i <= std::min(upto, len[c - 1]); ++i) v.push_back(z(c, i));
            return v;
        };
        auto join = [](std::vector<std::string> a, const std::vector<std::string>& b) {
            a.insert(a.end(), b.begin(), b.end());
            return a;
        };
        std::vector<std::string> z1 = bar(1, d.k1);
        // z1 chain
        for (int i = 1; i < d.k1; ++i) rows.push_back(z(1, i + 1));
        rows.push_back("w1");
        // z2 chain
        for (int i = 1; i <= d.p2(); ++i) {
            if (i < d.k2) {
                rows.push_back(z(2, i + 1));
            } else if (i < d.p2()) {
                const int off = i - d.k2;
                auto allowed = join(join(z1, bar(2, i + 1)), bar(3, d.k3 + d.delta + off + 1));
                rows.push_back(shaped(z(2, i + 1), allowed, false, out.regularity));
            } else {
                rows.push_back("w2");
            }
        }
        // z3 chain
        for (int i = 1; i <= d.r3(); ++i) {
            if (i < d.k3) {
                rows.push_back(z(3, i + 1));
            } else if (i < d.k3 + d.delta) {
                const int off = i - d.k3;
                auto allowed = join(join(z1, bar(2, d.k2 - d.delta + 1 + off)), bar(3, i + 1));
                rows.push_back(shaped(z(3, i + 1), allowed, false, out.regularity));
            } else if (i < d.p3()) {
                const int off = i - d.k3 - d.delta;
                auto allowed = join(join(z1, bar(2, d.k2 + off + 1)), bar(3, i + 1));
                rows.push_back(shaped(z(3, i + 1), allowed, false, out.regularity));
            } else if (i < d.r3()) {
                auto allowed = join(join(z1, bar(2, d.p2())), bar(3, i + 1));
                rows.push_back(shaped(z(3, i + 1), allowed, true, out.regularity));
            } else {
                rows.push_back("w3");
            }
        }
        out.sys = make_from(states, rows);
        out.phi = {sflat::Expr::symbol(z(1, 1)), sflat::Expr::symbol(z(2, 1)), sflat::Expr::symbol(z(3, 1))};
        return out;
    }

    Gtf3Instance random(int max_n = 8) { return make(random_dims(max_n)); }

private:
    int uniform(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

    std::string monomial(const std::vector<std::string>& vars) {
        if (vars.empty()) return "1";
        std::string m = vars[static_cast<std::size_t>(uniform(0, static_cast<int>(vars.size()) - 1))];
        if (uniform(0, 1)) m += "*" + vars[static_cast<std::size_t>(uniform(0, static_cast<int>(vars.size()) - 1))];
        return m;
    }

    // -1 is excluded so that next - next and 1 - 1 cannot cancel.
    std::string coeff() {
        static const int choices[3] = {-2, 1, 2};
        return std::to_string(choices[uniform(0, 2)]);
    }

    /// next + c*m + (1 + c'*m')*w1 [+ (c''*m'')*w2]; the coefficient of w1
    /// is recorded as a regularity expression.
    std::string shaped(const std::string& next, const std::vector<std::string>& allowed, bool with_w2,
                       std::vector<sflat::Expr>& reg) {
        std::string b1 = "(1 + (" + coeff() + ")*" + monomial(allowed) + ")";
        std::string row = next + " + (" + coeff() + ")*" + monomial(allowed) + " + " + b1 + "*w1";
        if (with_w2) row += " + (" + coeff() + ")*" + monomial(allowed) + "*w2";
        reg.push_back(sflat::parse_expr(b1));
        return row;
    }

    static sflat::SystemModel make_from(const std::vector<std::string>& states, const std::vector<std::string>& rows) {
        sflat::SystemModel sys;
        for (const auto& s : states) sys.states.emplace_back(s, sflat::SymbolKind::State);
        for (const char* u : {"w1", "w2", "w3"}) sys.inputs.emplace_back(u, sflat::SymbolKind::Input);
        for (const auto& r : rows) sys.dynamics.push_back(sflat::parse_expr(r));
        sys.affine = sflat::affine_decomposition(sys);
        return sys;
    }

    std::mt19937_64 rng_;
};

}  // namespace fixtures
