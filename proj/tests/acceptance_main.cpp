// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "fixtures.hpp"
#include "property_suites.hpp"
#include "sflat/flatness/analysis.hpp"
#include "sflat/io/system_file.hpp"
#include "sflat/planner/planner.hpp"
#include "sflat/prolongation/prolongation.hpp"
#include "sflat/triangular/triangular.hpp"

using namespace sflat;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string str(const std::vector<MultiIndex>& v) {
    std::string s;
    for (const auto& m : v) s += (s.empty() ? "" : ",") + m.to_string();
    return s;
}

template <typename T>
std::string str(const std::vector<T>& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

const SearchResult& example2_search(double* secs = nullptr) {
    static double elapsed = 0.0;
    static const SearchResult s = [] {
        const auto t = Clock::now();
        auto f = load_system(std::string(SFLAT_DATA_DIR) + "/example2.sys");
        SearchResult r = iterative_search(f.system, f.flat_output);
        elapsed = seconds_since(t);
        return r;
    }();
    if (secs) *secs = elapsed;
    return s;
}

void criterion1(Check& c) {
    double secs = 0.0;
    const auto& s = example2_search(&secs);
    const auto& r = s.final_report();
    const int lifts = static_cast<int>(s.plan.history.size());
    c.require(s.verdict.is_yes(), "verdict yes");
    c.require(lifts == 1 && s.plan.history[0].affine_lift, "exactly one affine lift");
    c.require(r.candidate.K == MultiIndex(2, 2, 2), "K_e = (2,2,2)");
    c.require(r.candidate.R == MultiIndex(5, 4, 5), "R_e = (5,4,5)");
    c.require(r.candidate.d_diff == 4, "d_diff = 4");
    c.require(r.ds && r.ds->delta == 1, "delta = 1");
    c.require(secs < 60.0, "runtime < 60 s");
    c.detail << "lifts=" << lifts << " K=" << r.candidate.K.to_string() << " R=" << r.candidate.R.to_string()
             << " d_diff=" << r.candidate.d_diff << " delta=" << (r.ds ? r.ds->delta : -1) << " time=" << secs << "s";
}

void criterion2(Check& c) {
    const auto& r = example2_search().final_report();
    const std::vector<MultiIndex> want{{1, 1, 1}, {2, 1, 2}, {3, 2, 3}, {4, 3, 4}};
    c.require(r.A == want, "A(0..3)");
    c.require(r.coranks == std::vector<int>{1, 2, 1}, "coranks (1,2,1)");
    bool all_yes = !r.integrable.empty();
    for (const auto& t : r.integrable) all_yes = all_yes && t.is_yes();
    c.require(all_yes, "every level integrable");
    c.detail << "A=" << str(r.A) << " coranks=" << str(r.coranks) << " integrable=" << (all_yes ? "all yes" : "not all");
}

void criterion3(Check& c) {
    const auto& rep = example2_search().final_report();
    const std::vector<NamedExpr> hints{{"z1_2", parse_expr("x3 + x4*u1")}, {"z2_2", parse_expr("u1")},
                                       {"z2_3", parse_expr("u2")},         {"z3_2", parse_expr("x4*x7*u1 - x6")},
                                       {"z3_3", parse_expr("x7")},         {"z3_4", parse_expr("x6")},
                                       {"z3_5", parse_expr("u3")}};
    for (const auto& [label, h] : {std::pair{"hints", hints}, std::pair{"no hints", std::vector<NamedExpr>{}}}) {
        try {
            auto chart = extract_coordinates(*rep.system, rep.candidate.phi, *rep.ds, *rep.sequence, h);
            auto g = build_transformation(chart, *rep.system, *rep.ds);
            const Expr uh1(g.z_system.inputs[0]);
            auto z = [&](int ch, int i) { return Expr::variable(g.z(ch, i)); };
            const Expr want = z(2, 2) * z(3, 1) + z(3, 3) + z(3, 3) * uh1;
            c.require(g.dims() == std::array<int, 3>{2, 3, 5}, std::string(label) + ": dims (2,3,5)");
            c.require(g.row(3, 2).f == want, std::string(label) + ": row z3^2");
            c.require(g.taint.empty(), std::string(label) + ": forbidden-dependency tests decided");
            int from_hints = 0;
            for (const auto& chain : chart.chains)
                for (const auto& e : chain) from_hints += e.origin.rfind("hint:", 0) == 0;
            if (!h.empty()) c.require(from_hints > 0, "hints used");
            c.detail << label << " (" << from_hints << " from hints): dims (" << g.dims()[0] << "," << g.dims()[1] << "," << g.dims()[2] << ") z3_2' = "
                     << g.row(3, 2).f << "; ";
        } catch (const std::exception& e) {
            c.require(false, std::string(label) + ": " + e.what());
        }
    }
}

void criterion4(Check& c) {
    const auto& rep = example2_search().final_report();
    auto t = triangularize(rep);
    const Expr uh1(t.form.z_system.inputs[0]);
    bool seen = false;
    for (const auto& e : t.regularity.entries)
        if (e.condition == "delta_range" && e.i == 0) {
            seen = true;
            c.require(e.expr == Expr(1) + uh1, "delta_range i=0 is 1 + uh1");
            c.require(e.holds.is_yes() && !e.holds.certificate.empty(), "nonzero certificate");
            c.detail << "i=0: " << e.expr << " certified at " << e.holds.certificate.size() << " coordinates; ";
        }
    c.require(seen, "delta_range i=0 present");
    int certified = 0, vacuous = 0;
    for (const auto& e : t.regularity.entries) (e.vacuous ? vacuous : certified) += 1;
    c.require(t.regularity.all_hold(), "all conditions certified or vacuous");
    c.detail << certified << " certified, " << vacuous << " vacuous";
}

void criterion5(Check& c) {
    const auto& rep = example2_search().final_report();
    const auto t0 = Clock::now();
    auto tri = triangularize(rep);
    if (!tri.parameterization) {
        c.require(false, "parameterization");
        return;
    }
    const auto& F = *tri.parameterization;
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, F.R);
    auto grid = make_grid(0.0, 1.0, 1e-3);
    auto plan = plan_and_validate(*rep.system, F, rep.candidate.phi, ref, grid);
    const double secs = seconds_since(t0);
    for (double e : plan.sup_error) c.require(e <= 1e-6, "sup error <= 1e-6");
    FlatParameterization bad = F;
    bad.F_x[2] = bad.F_x[2] + Expr(Rational(1, 10));
    auto faulty = plan_and_validate(*rep.system, bad, rep.candidate.phi, ref, grid);
    const double fault = std::max({faulty.sup_error[0], faulty.sup_error[1], faulty.sup_error[2]});
    c.require(fault > 1e-3, "fault-injected error > 1e-3");
    c.require(secs < 10.0, "runtime < 10 s");
    c.detail << "sup error (" << plan.sup_error[0] << ", " << plan.sup_error[1] << ", " << plan.sup_error[2]
             << "), fault-injected " << fault << ", time " << secs << "s";
}

void criterion6(Check& c) {
    const MultiIndex K(2, 2, 2), R(4, 4, 4);
    c.require(differential_difference(R, 8) == 4, "d_diff = 4 from R and n");
    auto rep = analyze(fixtures::example1_shape(), fixtures::example1_output());
    c.require(rep.verdict.is_yes(), "verdict yes");
    c.require(rep.candidate.K == K && rep.candidate.R == R, "K = (2,2,2), R = (4,4,4)");
    c.require(rep.candidate.d_diff == 4, "d_diff = 4");
    c.require(rep.ds && rep.ds->delta == 0, "delta = 0");
    const std::vector<MultiIndex> want{{1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
    c.require(rep.A == want, "A(0..2)");
    std::vector<MultiIndex> from_formula;
    for (int i = 0; i <= 2; ++i) from_formula.push_back(multi_index_A(K, 0, i));
    c.require(from_formula == want, "A from K and delta");
    auto t = triangularize(rep);
    c.require(t.form.dims() == std::array<int, 3>{2, 2, 4} && rep.n == 8, "dims (2,2,4), n = 8");
    c.detail << "d_diff=" << rep.candidate.d_diff << " delta=" << (rep.ds ? rep.ds->delta : -1) << " A=" << str(rep.A)
             << " dims=(" << t.form.dims()[0] << "," << t.form.dims()[1] << "," << t.form.dims()[2] << ") n=" << rep.n;
}

void criterion7(Check& c) {
    const std::vector<std::pair<std::string, std::function<fixtures::SuiteResult()>>> suites{
        {"d(d)=0", [] { return fixtures::dd_zero_suite(11); }},
        {"derivative vs fd", [] { return fixtures::derivative_fd_suite(5); }},
        {"exact spans integrable", [] { return fixtures::exact_span_suite(3); }},
        {"gtf3 verdict and corank sum", [] { return fixtures::gtf3_verdict_suite(2024); }},
        {"contact forms rejected", [] { return fixtures::contact_form_suite(9); }},
    };
    for (const auto& [name, run] : suites) {
        const auto r = run();
        c.require(r.ok(), name + ": " + r.first_failure);
        c.detail << name << " " << r.cases - r.failures << "/" << r.cases << "; ";
    }
}

void criterion8(Check& c) {
    struct Case {
        std::string name;
        SystemModel sys;
        std::vector<Expr> phi;
        bool analysable;
    };
    const std::vector<Case> cases{{"example2", fixtures::example2(), fixtures::example2_output(), false},
                                  {"lifted example2", affine_lift(fixtures::example2()), fixtures::example2_output(), true},
                                  {"example1 shape", fixtures::example1_shape(), fixtures::example1_output(), true},
                                  {"chains", fixtures::chains(2, 1, 3), fixtures::chains_output(), true}};
    int checked = 0;
    for (const auto& k : cases) {
        const MultiIndex K = relative_degrees(k.sys, k.phi);
        const int dd = differential_difference(determine_R(k.sys, k.phi, K), static_cast<int>(k.sys.n()));
        std::optional<AnalysisReport> base;
        if (k.analysable) base = analyze(k.sys, k.phi);
        for (int d = 1; d <= 2; ++d) {
            const SystemModel p = prolong(k.sys, {d, d, d});
            const MultiIndex Ke = relative_degrees(p, k.phi);
            c.require(Ke == K + d, k.name + ": K_e = K + " + std::to_string(d));
            const int dde = differential_difference(determine_R(p, k.phi, Ke), static_cast<int>(p.n()));
            c.require(dde == dd, k.name + ": d_diff preserved at d = " + std::to_string(d));
            if (base) {
                auto e = analyze(p, k.phi);
                bool shifted = e.A.size() == base->A.size();
                for (std::size_t j = 0; shifted && j < base->A.size(); ++j) shifted = e.A[j] == base->A[j] + d;
                c.require(shifted, k.name + ": A_e(j) = A(j) + " + std::to_string(d));
            }
            ++checked;
        }
    }
    c.detail << checked << " (fixture, d) pairs";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"Example-2 prolong-search indices", criterion1},
        {"A-sequence, coranks, integrability", criterion2},
        {"transformation to GTF3", criterion3},
        {"regularity conditions", criterion4},
        {"round-trip planning", criterion5},
        {"Example-1 index arithmetic", criterion6},
        {"property suites", criterion7},
        {"prolongation invariants", criterion8},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("exception: ") + e.what());
        }
        if (!c.pass) ++failed;
        std::cout << (c.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << c.detail.str()
                  << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
