#include "sflat/io/report.hpp"

namespace sflat {

namespace {

Json exprs(const std::vector<Expr>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(e.to_string());
    return a;
}

Json names(const std::vector<Symbol>& v) {
    Json a = Json::array();
    for (const auto& s : v) a.push_back(s.name());
    return a;
}

}  // namespace

Json to_json(const TriState& t) {
    Json j{{"value", to_string(t)}, {"reason", t.reason}};
    if (!t.certificate.empty()) j["certificate"] = t.certificate;
    return j;
}

Json to_json(const MultiIndex& m) { return Json::array({m[0], m[1], m[2]}); }

Json to_json(const SystemModel& sys) {
    Json dyn = Json::object();
    for (std::size_t k = 0; k < sys.n(); ++k) dyn[sys.states[k].name()] = sys.dynamics[k].to_string();
    return {{"states", names(sys.states)},
            {"inputs", names(sys.inputs)},
            {"dynamics", dyn},
            {"control_affine", sys.affine.has_value()}};
}

Json to_json(const AnalysisReport& r) {
    Json j;
    j["n"] = r.n;
    j["verdict"] = to_json(r.verdict);
    j["flat_output"] = exprs(r.candidate.phi);
    j["K"] = to_json(r.candidate.K);
    j["R"] = to_json(r.candidate.R);
    j["d_diff"] = r.candidate.d_diff;
    j["permutation"] = r.candidate.permutation;
    if (r.ds) {
        const auto& d = *r.ds;
        j["p2"] = d.p2;
        j["p3"] = d.p3;
        j["s"] = d.s;
        j["d_rp"] = d.d_rp;
        j["d_max"] = d.d_max;
        j["delta"] = d.delta;
        j["P"] = to_json(d.P);
        j["u1_hat"] = {{"symbol", d.u1_hat.name()}, {"definition", d.u1_hat_definition.to_string()}};
        if (!d.taint.empty()) j["structure_taint"] = d.taint;
    }
    Json ids = Json::array();
    for (const auto& c : r.identities) ids.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
    j["identities"] = ids;
    if (r.minimal_sfl) {
        Json m{{"verdict", to_json(r.minimal_sfl->verdict)}, {"s", r.minimal_sfl->s}};
        if (r.minimal_sfl->phi_u2) m["phi_u2"] = r.minimal_sfl->phi_u2->to_string();
        j["minimal_sfl"] = m;
    }
    Json A = Json::array();
    for (const auto& a : r.A) A.push_back(to_json(a));
    j["A"] = A;
    j["coranks"] = r.coranks;
    Json integ = Json::array();
    for (std::size_t i = 0; i < r.integrable.size(); ++i) {
        Json e = to_json(r.integrable[i]);
        e["level"] = i;
        integ.push_back(e);
    }
    j["integrability"] = integ;
    j["diagnostics"] = r.diagnostics;
    j["prolongations"] = r.prolongations;
    j["history"] = r.history;
    if (r.system) j["system"] = to_json(*r.system);
    return j;
}

Json to_json(const SearchResult& r) {
    Json steps = Json::array();
    for (const auto& s : r.plan.history) steps.push_back({{"D", s.D}, {"affine_lift", s.affine_lift}});
    Json iters = Json::array();
    for (const auto& it : r.iterations) iters.push_back({{"n", it.n}, {"verdict", to_json(it.verdict)}});
    return {{"verdict", to_json(r.verdict)},
            {"message", r.message},
            {"cap", r.cap},
            {"prolongation", {{"D", r.plan.D}, {"m1", r.plan.m1}, {"history", steps}}},
            {"iterations", iters},
            {"analysis", to_json(r.final_report())}};
}

Json to_json(const CoordinateChart& c) {
    Json chains = Json::array();
    for (const auto& chain : c.chains) {
        Json a = Json::array();
        for (const auto& e : chain) a.push_back({{"z", e.z.name()}, {"fn", e.fn.to_string()}, {"origin", e.origin}});
        chains.push_back(a);
    }
    Json j{{"chains", chains}, {"jacobian_rank", c.jacobian.rank}, {"verified_points", c.verified_points}};
    if (c.inverse) {
        Json inv = Json::object();
        for (const auto& [v, e] : *c.inverse) inv[var_name(v)] = e.to_string();
        j["inverse"] = inv;
        j["inverse_guards"] = exprs(c.inverse_guards);
    }
    return j;
}

Json to_json(const GTF3Form& g) {
    Json rows = Json::array();
    for (const auto& r : g.rows)
        rows.push_back({{"chain", r.chain},
                        {"index", r.index},
                        {"f", r.f.to_string()},
                        {"a", r.a.to_string()},
                        {"b", {r.b1.to_string(), r.b2.to_string(), r.b3.to_string()}}});
    Json inputs = Json::array();
    for (const auto& t : g.inputs)
        inputs.push_back({{"input", t.input.name()},
                          {"replaces", t.replaced.name()},
                          {"definition", t.definition.to_string()},
                          {"definition_z", t.definition_z.to_string()},
                          {"inverse", t.inverse.to_string()},
                          {"guards", exprs(t.guards)}});
    return {{"dims", g.dims()},
            {"k", {g.k1, g.k2, g.k3}},
            {"p2", g.p2},
            {"p3", g.p3},
            {"r3", g.r3},
            {"delta", g.delta},
            {"rows", rows},
            {"inputs", inputs},
            {"taint", g.taint}};
}

Json to_json(const RegularityReport& r, const GTF3Form& g, const std::optional<Point>& point) {
    std::optional<Point> zp;
    if (point) {
        Point p;
        bool ok = true;
        for (const auto& chain : g.chart.chains)
            for (const auto& e : chain) {
                auto v = evaluate(e.fn, *point);
                if (v) p.set(e.z.var(), *v);
                else ok = false;
            }
        for (const auto& t : g.inputs) {
            auto v = evaluate(t.definition, *point);
            if (v) p.set(t.input.var(), *v);
            else ok = false;
        }
        if (ok) zp = p;
    }
    Json a = Json::array();
    for (const auto& e : r.entries) {
        Json j{{"condition", e.condition}, {"i", e.i}, {"vacuous", e.vacuous}};
        if (!e.vacuous) {
            j["expr"] = e.expr.to_string();
            j["holds"] = to_json(e.holds);
            if (zp) {
                auto v = evaluate(e.expr, *zp);
                j["value_at_point"] = v ? Json(*v) : Json(nullptr);
            }
        }
        a.push_back(j);
    }
    return a;
}

Json to_json(const FlatParameterization& F) {
    Json x = Json::object(), u = Json::object();
    for (std::size_t k = 0; k < F.states.size(); ++k) x[F.states[k].name()] = F.F_x[k].to_string();
    for (std::size_t k = 0; k < F.inputs.size(); ++k) u[F.inputs[k].name()] = F.F_u[k].to_string();
    bool residuals_zero = true;
    for (const auto& r : F.residuals) residuals_zero = residuals_zero && r.is_zero();
    return {{"flat_output_bases", F.base},
            {"R", F.R},
            {"states", x},
            {"inputs", u},
            {"u_hat", exprs({F.u_hat.begin(), F.u_hat.end()})},
            {"guards", exprs(F.guards)},
            {"residuals_zero", residuals_zero}};
}

Json plan_summary(const PlanResult& p) {
    return {{"samples", p.t.size()},
            {"t0", p.t.empty() ? 0.0 : p.t.front()},
            {"tf", p.t.empty() ? 0.0 : p.t.back()},
            {"sup_error", p.sup_error}};
}

Json report_document(const std::string& command, Json payload) {
    payload["schema_version"] = kReportSchemaVersion;
    payload["command"] = command;
    return payload;
}

std::string emit_report(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace sflat
