#include <algorithm>
#include <set>

#include "sflat/triangular/triangular.hpp"

namespace sflat {

const GtfRow& GTF3Form::row(int chain, int index) const {
    for (const auto& r : rows)
        if (r.chain == chain && r.index == index) return r;
    throw std::out_of_range("no GTF3 row z" + std::to_string(chain) + "^" + std::to_string(index));
}

namespace {

std::string fresh(const SystemModel& sys, const std::string& base) {
    std::set<std::string> taken;
    for (const auto& s : sys.states) taken.insert(s.base);
    for (const auto& s : sys.inputs) taken.insert(s.base);
    std::string name = base;
    while (taken.count(name)) name += "h";
    return name;
}

std::string row_name(int chain, int index) { return "z" + std::to_string(chain) + "^" + std::to_string(index); }

}  // namespace

GTF3Form build_transformation(const CoordinateChart& chart, const SystemModel& sys, const DerivativeStructure& ds,
                              const SampleOptions& opts) {
    if (!chart.inverse) throw TriangularError("chart inverse is not available in closed form");
    if (chart.jacobian.rank != sys.n()) throw TriangularError("chart invertibility is not certified");

    GTF3Form g;
    g.k1 = ds.K[0];
    g.k2 = ds.K[1];
    g.k3 = ds.K[2];
    g.p2 = ds.p2;
    g.p3 = ds.p3;
    g.r3 = ds.R[2];
    g.delta = ds.delta;
    g.chart = chart;
    g.source_inputs = sys.inputs;

    InputReplacement norm = replace_input(sys, ds.u1_hat_definition, ds.u1_hat, {ds.replaced_input}, 0, opts);

    // z' = dPhi/dx f(x, uh1, u'), then x -> Phi^{-1}(z).
    SystemModel zs;
    zs.states = chart.z_symbols();
    zs.inputs = norm.system.inputs;
    for (const auto& fn : chart.functions()) {
        Expr d(0);
        for (std::size_t k = 0; k < sys.n(); ++k) {
            const Var x = sys.states[k].var();
            if (fn.depends_on(x)) d += differentiate(fn, x) * norm.system.dynamics[k];
        }
        zs.dynamics.push_back(substitute(d, *chart.inverse));
    }
    Bindings to_x;  // z -> Phi(x)
    for (const auto& e : chart.chains[0]) to_x[e.z.var()] = e.fn;
    for (const auto& e : chart.chains[1]) to_x[e.z.var()] = e.fn;
    for (const auto& e : chart.chains[2]) to_x[e.z.var()] = e.fn;

    auto row_index = [&](int chain, int index) {
        std::size_t off = 0;
        for (int c = 1; c < chain; ++c) off += chart.chains[static_cast<std::size_t>(c - 1)].size();
        return off + static_cast<std::size_t>(index - 1);
    };

    g.inputs[0].input = norm.new_input;
    g.inputs[0].replaced = norm.replaced_symbol;
    g.inputs[0].definition = norm.definition;
    g.inputs[0].definition_z = substitute(norm.definition, *chart.inverse);
    g.inputs[0].inverse = norm.inverse;
    g.inputs[0].guards = norm.guards;

    Symbol uh2(fresh(zs, "uh2"), SymbolKind::Input);
    InputReplacement step3 =
        replace_input(zs, zs.dynamics[row_index(2, g.p2)], uh2, {ds.u2_index, ds.u3_index}, 1, opts);
    Symbol uh3(fresh(step3.system, "uh3"), SymbolKind::Input);
    InputReplacement step4 = replace_input(step3.system, step3.system.dynamics[row_index(3, g.r3)], uh3, {2}, 2, opts);
    g.z_system = step4.system;

    Bindings back{{norm.new_input.var(), norm.definition}};
    for (const auto& [z, fn] : to_x) back[z] = fn;
    for (auto [rep, slot] : {std::pair{&step3, 1}, std::pair{&step4, 2}}) {
        InputTransform& t = g.inputs[static_cast<std::size_t>(slot)];
        t.input = rep->new_input;
        t.replaced = rep->replaced_symbol;
        t.definition_z = rep->definition;
        t.definition = substitute(rep->definition, back);
        t.inverse = rep->inverse;
        t.guards = rep->guards;
        back[rep->new_input.var()] = t.definition;
    }

    const Var u[3] = {g.z_system.inputs[0].var(), g.z_system.inputs[1].var(), g.z_system.inputs[2].var()};
    auto zv = [&](int chain, int index) { return chart.entry(chain, index).z.var(); };
    auto upto = [&](std::vector<Var>& out, int chain, int last) {
        const int len = static_cast<int>(chart.chains[static_cast<std::size_t>(chain - 1)].size());
        for (int i = 1; i <= std::min(last, len); ++i) out.push_back(zv(chain, i));
    };

    const int len[3] = {g.k1, g.p2, g.r3};
    for (int c = 1; c <= 3; ++c) {
        for (int i = 1; i <= len[c - 1]; ++i) {
            GtfRow row;
            row.chain = c;
            row.index = i;
            row.f = g.z_system.dynamics[row_index(c, i)];
            Bindings zero{{u[0], Expr(0)}, {u[1], Expr(0)}, {u[2], Expr(0)}};
            row.a = substitute(row.f, zero);
            row.b1 = differentiate(row.f, u[0]);
            row.b2 = differentiate(row.f, u[1]);
            row.b3 = differentiate(row.f, u[2]);

            const int kc = c == 1 ? g.k1 : (c == 2 ? g.k2 : g.k3);
            std::vector<Var> allowed;
            std::vector<Var> inputs;
            bool exact = false;
            Expr expect;
            if (i == len[c - 1]) {
                exact = true;
                expect = Expr::variable(u[c - 1]);
            } else if (i < kc) {
                exact = true;
                expect = Expr::variable(zv(c, i + 1));
            } else if (c == 2) {
                const int ii = i - g.k2;
                upto(allowed, 1, g.k1);
                upto(allowed, 2, g.k2 + ii + 1);
                upto(allowed, 3, g.k3 + g.delta + ii + 1);
                inputs = {u[0]};
            } else {
                const int ii = i - g.k3;
                upto(allowed, 1, g.k1);
                if (ii <= g.p3 - g.k3 - 1) {
                    upto(allowed, 2, g.k2 - g.delta + 1 + ii);
                    inputs = {u[0]};
                } else {
                    upto(allowed, 2, g.p2);
                    inputs = {u[0], u[1]};
                }
                upto(allowed, 3, g.k3 + ii + 1);
            }
            if (exact) {
                if (row.f != expect)
                    throw TriangularError("internal inconsistency: row " + row_name(c, i) + " is " +
                                          row.f.to_string() + ", expected " + expect.to_string());
                const auto at = expect.atoms();
                row.allowed = {at.begin(), at.end()};
                g.rows.push_back(std::move(row));
                continue;
            }
            row.allowed = allowed;
            row.allowed.insert(row.allowed.end(), inputs.begin(), inputs.end());
            std::set<Var> ok(row.allowed.begin(), row.allowed.end());

            auto check_zero = [&](const Expr& e, const std::string& what) {
                TriState t = is_identically_zero(e, opts);
                if (t.is_no())
                    throw TriangularError("internal inconsistency: row " + row_name(c, i) + " " + what);
                if (t.is_inconclusive()) {
                    if (!g.taint.empty()) g.taint += "; ";
                    g.taint += "row " + row_name(c, i) + ": " + what + " not decided";
                }
            };
            for (Var v : row.f.free_symbols()) {
                if (ok.count(v)) continue;
                check_zero(differentiate(row.f, v), "depends on " + var_name(v));
            }
            for (std::size_t p = 0; p < inputs.size(); ++p)
                for (std::size_t q = p; q < inputs.size(); ++q)
                    if (row.f.depends_on(inputs[p]))
                        check_zero(differentiate(differentiate(row.f, inputs[p]), inputs[q]),
                                   "is not affine in " + var_name(inputs[p]));
            g.rows.push_back(std::move(row));
        }
    }
    return g;
}

bool RegularityReport::any_fails() const {
    return std::any_of(entries.begin(), entries.end(), [](const RegularityEntry& e) { return e.holds.is_no(); });
}

bool RegularityReport::all_hold() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const RegularityEntry& e) { return e.vacuous || e.holds.is_yes(); });
}

RegularityReport check_regularity(const GTF3Form& g, const SampleOptions& opts) {
    RegularityReport rep;
    const Var uh2 = g.z_system.inputs[1].var();
    auto judge = [&](const std::string& cond, int i, const Expr& e) {
        RegularityEntry en;
        en.condition = cond;
        en.i = i;
        en.expr = e;
        TriState z = is_identically_zero(e, opts);
        if (z.is_no())
            en.holds = TriState::yes("certified nonzero");
        else if (z.is_yes())
            en.holds = TriState::no("vanishes identically");
        else
            en.holds = TriState::inconclusive(z.reason);
        en.holds.certificate = z.certificate;
        rep.entries.push_back(std::move(en));
    };
    auto vacuous = [&](const std::string& cond) {
        RegularityEntry en;
        en.condition = cond;
        en.vacuous = true;
        en.holds = TriState::yes("vacuous");
        rep.entries.push_back(std::move(en));
    };
    // Rows below the z2 chain end carry uh1 only.
    auto partial_u1 = [&](const GtfRow& r) { return r.a + r.b1 * Expr::variable(g.z_system.inputs[0].var()); };

    if (g.p2 > g.k2)
        judge("b21_k2", -1, g.row(2, g.k2).b1);
    else
        vacuous("b21_k2");
    if (g.r3 > g.k3)
        judge("b31_k3", -1, g.row(3, g.k3).b1);
    else
        vacuous("b31_k3");

    if (g.delta == 0) vacuous("delta_range");
    for (int i = 0; i < g.delta; ++i)
        judge("delta_range", i, differentiate(partial_u1(g.row(3, g.k3 + i)), g.z(3, g.k3 + i + 1)));

    if (g.p2 == g.k2) vacuous("coupled_range");
    for (int i = 0; i <= g.p2 - g.k2 - 1; ++i) {
        const Expr f2 = partial_u1(g.row(2, g.k2 + i));
        const Expr f3 = partial_u1(g.row(3, g.k3 + g.delta + i));
        const Var a = g.z(2, g.k2 + i + 1), b = g.z(3, g.k3 + g.delta + i + 1);
        judge("coupled_range", i, differentiate(f2, a) * differentiate(f3, b) - differentiate(f2, b) * differentiate(f3, a));
    }

    if (g.r3 - g.k3 - 1 < g.p3 - g.k3) vacuous("upper_range");
    for (int i = g.p3 - g.k3; i <= g.r3 - g.k3 - 1; ++i) {
        const GtfRow& r = g.row(3, g.k3 + i);
        const Expr f = r.a + r.b1 * Expr::variable(g.z_system.inputs[0].var()) + r.b2 * Expr::variable(uh2);
        judge("upper_range", i, differentiate(f, g.z(3, g.k3 + i + 1)));
    }
    return rep;
}

}  // namespace sflat
