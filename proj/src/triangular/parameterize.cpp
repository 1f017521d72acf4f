#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "sflat/numeric/rk4.hpp"
#include "sflat/triangular/triangular.hpp"

namespace sflat {

Symbol FlatParameterization::jet(int component, int order) const {
    return Symbol(base[static_cast<std::size_t>(component - 1)], SymbolKind::FlatJet, static_cast<unsigned>(order));
}

std::array<int, 3> FlatParameterization::max_order(const std::vector<Expr>& exprs) const {
    std::array<int, 3> out{-1, -1, -1};
    std::set<Var> vars;
    for (const auto& e : exprs) {
        auto fs = e.free_symbols();
        vars.insert(fs.begin(), fs.end());
    }
    const int top = *std::max_element(R.begin(), R.end()) + 4;
    for (int c = 1; c <= 3; ++c)
        for (int l = 0; l <= top; ++l) {
            Var v;
            if (KernelTable::instance().lookup(jet(c, l).name(), v) && vars.count(v))
                out[static_cast<std::size_t>(c - 1)] = l;
        }
    return out;
}

namespace {

/// Total time derivative on flat jets: y^j_[l] -> y^j_[l+1].
class JetDerivative {
public:
    explicit JetDerivative(const FlatParameterization& F) {
        const int top = *std::max_element(F.R.begin(), F.R.end()) + 4;
        for (int c = 1; c <= 3; ++c)
            for (int l = 0; l < top; ++l) next_[F.jet(c, l).var()] = F.jet(c, l + 1).var();
    }
    Expr operator()(const Expr& h) const {
        Expr out(0);
        for (Var v : h.free_symbols()) {
            auto it = next_.find(v);
            if (it == next_.end()) continue;
            out += differentiate(h, v) * Expr::variable(it->second);
        }
        return out;
    }

private:
    std::map<Var, Var> next_;
};

void add_guard(std::vector<Expr>& guards, const Expr& g) {
    if (g.is_constant() && !g.is_zero()) return;
    if (std::find(guards.begin(), guards.end(), g) == guards.end()) guards.push_back(g);
}

std::string flat_base(const GTF3Form& g) {
    std::set<std::string> taken;
    for (const auto& s : g.chart.source_states) taken.insert(s.base);
    for (const auto& s : g.source_inputs) taken.insert(s.base);
    std::string b = "y";
    auto clash = [&] {
        for (int c = 1; c <= 3; ++c)
            if (taken.count(b + std::to_string(c))) return true;
        return false;
    };
    while (clash()) b += "f";
    return b;
}

}  // namespace

FlatParameterization parameterize(const GTF3Form& g, const SampleOptions& opts) {
    (void)opts;
    if (!g.chart.inverse) throw TriangularError("parameterization needs the chart inverse");
    FlatParameterization F;
    const std::string yb = flat_base(g);
    for (int c = 0; c < 3; ++c) F.base[static_cast<std::size_t>(c)] = yb + std::to_string(c + 1);
    F.R = {g.k1 + g.r3 - g.k3, g.p2 + g.r3 - g.p3, g.r3};
    F.states = g.chart.source_states;
    F.inputs = g.source_inputs;
    JetDerivative D(F);

    Bindings& Z = F.z_values;
    const int kk[3] = {g.k1, g.k2, g.k3};
    for (int c = 1; c <= 3; ++c)
        for (int i = 1; i <= kk[c - 1]; ++i) Z[g.z(c, i)] = Expr(F.jet(c, i - 1));
    const Var uh[3] = {g.z_system.inputs[0].var(), g.z_system.inputs[1].var(), g.z_system.inputs[2].var()};
    F.u_hat[0] = Expr(F.jet(1, g.k1));
    Bindings known = Z;
    known[uh[0]] = F.u_hat[0];

    auto step = [&](const std::string& label, const std::vector<std::pair<int, int>>& rows,
                    const std::vector<std::pair<int, int>>& unknown) {
        std::vector<Expr> eqs;
        std::vector<Var> vars;
        for (auto [c, i] : rows) eqs.push_back(D(Z.at(g.z(c, i))) - substitute(g.row(c, i).f, known));
        for (auto [c, i] : unknown) vars.push_back(g.z(c, i));
        Solution sol;
        try {
            sol = solve_for(eqs, vars);
        } catch (const SolveError& e) {
            std::string eq;
            for (const auto& x : eqs) eq += (eq.empty() ? "" : ", ") + x.to_string() + " = 0";
            throw TriangularError("parameterization " + label + ": " + e.what() + " in " + eq);
        }
        for (auto [c, i] : unknown) {
            const Expr v = sol.values.at(g.z(c, i));
            Z[g.z(c, i)] = v;
            known[g.z(c, i)] = v;
        }
        for (const auto& gd : sol.guards) add_guard(F.guards, gd);
        for (const auto& e : eqs) F.residuals.push_back(substitute(e, sol.values));
    };

    for (int i = 0; i < g.delta; ++i)
        step("step 2, level " + std::to_string(i), {{3, g.k3 + i}}, {{3, g.k3 + i + 1}});
    for (int i = 0; i <= g.p2 - g.k2 - 1; ++i)
        step("step 3, level " + std::to_string(i), {{2, g.k2 + i}, {3, g.k3 + g.delta + i}},
             {{2, g.k2 + i + 1}, {3, g.k3 + g.delta + i + 1}});
    F.u_hat[1] = D(Z.at(g.z(2, g.p2)));
    known[uh[1]] = F.u_hat[1];
    for (int i = g.p3 - g.k3; i <= g.r3 - g.k3 - 1; ++i)
        step("step 4, level " + std::to_string(i), {{3, g.k3 + i}}, {{3, g.k3 + i + 1}});
    F.u_hat[2] = D(Z.at(g.z(3, g.r3)));
    known[uh[2]] = F.u_hat[2];

    std::set<Var> zvars;
    for (const auto& zsym : g.chart.z_symbols()) zvars.insert(zsym.var());
    for (const auto& zsym : g.chart.z_symbols())
        for (Var v : Z.at(zsym.var()).free_symbols())
            if (zvars.count(v))
                throw TriangularError("parameterization of " + zsym.name() + " still involves " + var_name(v));

    for (const auto& x : F.states) F.F_x.push_back(substitute(g.chart.inverse->at(x.var()), Z));
    for (const auto& gd : g.chart.inverse_guards) add_guard(F.guards, substitute(gd, Z));

    Bindings all = known;
    for (std::size_t k = 0; k < F.states.size(); ++k) all[F.states[k].var()] = F.F_x[k];
    for (int slot : {2, 1, 0}) {
        const InputTransform& t = g.inputs[static_cast<std::size_t>(slot)];
        all[t.replaced.var()] = substitute(t.inverse, all);
        for (const auto& gd : t.guards) add_guard(F.guards, substitute(gd, all));
    }
    for (const auto& u : F.inputs) F.F_u.push_back(all.at(u.var()));
    return F;
}

double JetTrajectory::value(int component, int order, double t) const {
    const auto& c = coeffs[static_cast<std::size_t>(component - 1)];
    double out = 0.0, fact = 1.0, tp = 1.0;
    for (std::size_t l = static_cast<std::size_t>(order), q = 0; l < c.size(); ++l, ++q) {
        if (q > 0) {
            fact *= static_cast<double>(q);
            tp *= t;
        }
        out += c[l] * tp / fact;
    }
    return out;
}

bool guards_hold(const FlatParameterization& F, const Point& jets, double tol) {
    for (const auto& g : F.guards) {
        auto v = evaluate(g, jets);
        if (!v || std::abs(*v) < tol) return false;
    }
    return true;
}

VerificationReport verify_parameterization(const SystemModel& sys, const FlatParameterization& F,
                                           const std::vector<Expr>& phi, int trials, std::uint64_t seed, double dt,
                                           double tolerance) {
    VerificationReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const std::size_t n = sys.n();

    auto jets_at = [&](const JetTrajectory& y, double t) {
        Point p;
        for (int c = 1; c <= 3; ++c) {
            const int top = static_cast<int>(y.coeffs[static_cast<std::size_t>(c - 1)].size());
            for (int l = 0; l < top; ++l) p.set(F.jet(c, l).var(), y.value(c, l, t));
        }
        return p;
    };
    auto eval_all = [](const std::vector<Expr>& es, const Point& p, Eigen::VectorXd& out) {
        out.resize(static_cast<Eigen::Index>(es.size()));
        for (std::size_t i = 0; i < es.size(); ++i) {
            auto v = evaluate(es[i], p);
            if (!v) return false;
            out[static_cast<Eigen::Index>(i)] = *v;
        }
        return true;
    };

    int attempts = 0;
    while (rep.trials < trials) {
        if (++attempts > 50 * trials + 100) {
            rep.failure = "could not draw flat jets away from the guards";
            return rep;
        }
        JetTrajectory y;
        for (int c = 0; c < 3; ++c) {
            y.coeffs[static_cast<std::size_t>(c)].resize(static_cast<std::size_t>(F.R[static_cast<std::size_t>(c)] + 3));
            for (auto& v : y.coeffs[static_cast<std::size_t>(c)]) v = unit(rng);
        }
        const Point p0 = jets_at(y, 0.0), ph = jets_at(y, dt / 2), p1 = jets_at(y, dt);
        if (!guards_hold(F, p0) || !guards_hold(F, ph) || !guards_hold(F, p1)) {
            ++rep.rejected;
            continue;
        }
        Eigen::VectorXd x0, x1_ref, u;
        if (!eval_all(F.F_x, p0, x0) || !eval_all(F.F_x, p1, x1_ref)) {
            ++rep.rejected;
            continue;
        }
        bool ok = true;
        auto rhs = [&](double t, const Eigen::VectorXd& x) {
            Point p = jets_at(y, t);
            Eigen::VectorXd uu;
            Eigen::VectorXd dx = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), std::nan(""));
            if (!eval_all(F.F_u, p, uu)) {
                ok = false;
                return dx;
            }
            Point q;
            for (std::size_t k = 0; k < n; ++k) q.set(sys.states[k].var(), x[static_cast<Eigen::Index>(k)]);
            for (std::size_t j = 0; j < sys.m(); ++j) q.set(F.inputs[j].var(), uu[static_cast<Eigen::Index>(j)]);
            for (std::size_t k = 0; k < n; ++k) {
                auto v = evaluate(sys.dynamics[k], q);
                if (!v) ok = false;
                dx[static_cast<Eigen::Index>(k)] = v ? *v : std::nan("");
            }
            return dx;
        };
        const Eigen::VectorXd x1 = rk4_step(rhs, 0.0, x0, dt);
        ++rep.trials;

        double drift = 0.0;
        std::string worst;
        auto compare = [&](double a, double b, const std::string& what) {
            const double d = std::abs(a - b) / std::max(1.0, std::abs(b));
            if (!(d <= drift)) {
                drift = std::isfinite(d) ? d : INFINITY;
                worst = what;
            }
        };
        for (std::size_t k = 0; k < n; ++k)
            compare(x1[static_cast<Eigen::Index>(k)], x1_ref[static_cast<Eigen::Index>(k)], sys.states[k].name());
        Point q;
        for (std::size_t k = 0; k < n; ++k) q.set(sys.states[k].var(), x1[static_cast<Eigen::Index>(k)]);
        for (int c = 1; c <= 3; ++c) {
            auto v = evaluate(phi[static_cast<std::size_t>(c - 1)], q);
            compare(v ? *v : NAN, y.value(c, 0, dt), F.jet(c, 0).name());
        }
        if (!ok) drift = INFINITY;
        rep.max_drift = std::max(rep.max_drift, drift);
        if (!(drift <= tolerance) && rep.failure.empty()) {
            std::ostringstream os;
            os << "trial " << rep.trials << ": drift " << drift << " in " << worst << " at jets";
            for (int c = 1; c <= 3; ++c) {
                os << " " << F.base[static_cast<std::size_t>(c - 1)] << "=(";
                const auto& cf = y.coeffs[static_cast<std::size_t>(c - 1)];
                for (std::size_t l = 0; l < cf.size(); ++l) os << (l ? "," : "") << cf[l];
                os << ")";
            }
            rep.failure = os.str();
        }
    }
    rep.pass = rep.failure.empty();
    return rep;
}

TriangularResult triangularize(const AnalysisReport& rep, const std::vector<NamedExpr>& hints,
                               const SampleOptions& opts) {
    if (!rep.verdict.is_yes() || !rep.ds || !rep.sequence || !rep.system)
        throw TriangularError("triangular form needs an analysis with verdict yes (got " + to_string(rep.verdict) +
                              ")");
    TriangularResult out;
    out.chart = extract_coordinates(*rep.system, rep.candidate.phi, *rep.ds, *rep.sequence, hints, opts);
    out.form = build_transformation(out.chart, *rep.system, *rep.ds, opts);
    if (!out.form.taint.empty()) out.diagnostics.push_back("dependency pattern: " + out.form.taint);
    out.regularity = check_regularity(out.form, opts);
    if (out.regularity.any_fails()) {
        out.diagnostics.push_back("a regularity condition vanishes identically; no parameterization");
        return out;
    }
    out.parameterization = parameterize(out.form, opts);
    return out;
}

}  // namespace sflat
