// Command-line front end: analyze, transform, parameterize, prolong-search,
// plan and check-gtf3 on system files.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sflat/io/report.hpp"
#include "sflat/io/system_file.hpp"

using namespace sflat;

namespace {

enum Exit { kYes = 0, kNo = 1, kInconclusive = 2, kInputError = 3 };

int exit_for(const TriState& t) { return t.is_yes() ? kYes : (t.is_no() ? kNo : kInconclusive); }

struct Common {
    std::string file;
    std::string json_out;
    std::uint64_t seed = 0;
    int samples = 20;
    int cap = -1;
};

struct PlanFlags {
    double t0 = 0.0, tf = 1.0, dt = 1e-3, tol = 1e-6;
    std::string csv_out, start, end;
};

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_json(const Common& c, const std::string& command, Json payload) {
    if (c.json_out.empty()) return;
    const std::string text = emit_report(report_document(command, std::move(payload)));
    if (c.json_out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(c.json_out, std::ios::binary);
    if (!out) throw InputError("cannot write " + c.json_out);
    out << text;
}

AnalyzeOptions analyze_options(const Common& c, const SystemFile& f) {
    AnalyzeOptions o;
    o.sampling.seed = c.seed;
    o.sampling.samples = c.samples;
    o.phi_u2_hint = f.hints.phi_u2;
    return o;
}

SystemFile load_for_analysis(const Common& c) {
    SystemFile f = load_system(c.file);
    if (f.system.m() != 3) throw InputError("analysis needs exactly three inputs, got " + std::to_string(f.system.m()));
    if (f.flat_output.size() != 3)
        throw InputError("analysis needs exactly three flat-output lines, got " + std::to_string(f.flat_output.size()));
    return f;
}

std::optional<int> cap_of(const Common& c) { return c.cap < 0 ? std::nullopt : std::optional<int>(c.cap); }

void print_analysis(const AnalysisReport& r) {
    std::cout << "verdict: " << to_string(r.verdict);
    if (!r.verdict.is_yes()) std::cout << " (" << r.verdict.reason << ")";
    std::cout << "\n";
    if (r.candidate.K.sum() == 0) return;
    std::cout << "n = " << r.n << ", K = " << r.candidate.K.to_string() << ", R = " << r.candidate.R.to_string()
              << ", d_diff = " << r.candidate.d_diff << "\n";
    if (r.ds)
        std::cout << "p2 = " << r.ds->p2 << ", p3 = " << r.ds->p3 << ", s = " << r.ds->s << ", delta = " << r.ds->delta
                  << "\n";
    for (std::size_t i = 0; i < r.A.size(); ++i) {
        std::cout << "A(" << i << ") = " << r.A[i].to_string();
        if (i < r.coranks.size()) std::cout << "  corank " << r.coranks[i];
        if (i < r.integrable.size()) std::cout << "  integrable " << to_string(r.integrable[i]);
        std::cout << "\n";
    }
}

void print_search(const SearchResult& s) {
    std::cout << "prolongations: " << s.plan.history.size() << " (cap " << s.cap << ")\n";
    for (const auto& h : s.plan.history) {
        std::cout << "  D =";
        for (int d : h.D) std::cout << " " << d;
        if (h.affine_lift) std::cout << "  (affine lift)";
        std::cout << "\n";
    }
    if (!s.message.empty()) std::cout << s.message << "\n";
    print_analysis(s.final_report());
}

int cmd_analyze(const Common& c) {
    SystemFile f = load_for_analysis(c);
    AnalysisReport r = analyze(f.system, f.flat_output, analyze_options(c, f));
    print_analysis(r);
    write_json(c, "analyze", to_json(r));
    return exit_for(r.verdict);
}

int cmd_prolong_search(const Common& c) {
    SystemFile f = load_for_analysis(c);
    SearchResult s = iterative_search(f.system, f.flat_output, cap_of(c), analyze_options(c, f));
    print_search(s);
    write_json(c, "prolong-search", to_json(s));
    return exit_for(s.verdict);
}

// Search, then the chart and triangular form; parameterization when asked.
int cmd_triangular(const Common& c, bool with_parameterization, const PlanFlags* plan) {
    SystemFile f = load_for_analysis(c);
    AnalyzeOptions o = analyze_options(c, f);
    SearchResult s = iterative_search(f.system, f.flat_output, cap_of(c), o);
    const std::string command = plan ? "plan" : (with_parameterization ? "parameterize" : "transform");
    Json doc{{"search", to_json(s)}};
    if (!s.verdict.is_yes()) {
        print_search(s);
        write_json(c, command, doc);
        return exit_for(s.verdict);
    }
    const AnalysisReport& rep = s.final_report();
    CoordinateChart chart = extract_coordinates(*rep.system, rep.candidate.phi, *rep.ds, *rep.sequence,
                                                f.hints.coordinates, o.sampling);
    GTF3Form form = build_transformation(chart, *rep.system, *rep.ds, o.sampling);
    RegularityReport reg = check_regularity(form, o.sampling);
    doc["chart"] = to_json(chart);
    doc["gtf3"] = to_json(form);
    doc["regularity"] = to_json(reg, form, hint_point(f.hints));

    const auto dims = form.dims();
    std::cout << "GTF3 dims (" << dims[0] << "," << dims[1] << "," << dims[2] << ")\n";
    for (int ch = 0; ch < 3; ++ch)
        for (const auto& e : chart.chains[static_cast<std::size_t>(ch)]) std::cout << "  " << e.z.name() << " = " << e.fn << "\n";
    for (const auto& e : reg.entries) {
        std::cout << "  " << e.condition;
        if (e.i >= 0) std::cout << " i=" << e.i;
        if (e.vacuous) std::cout << ": vacuous\n";
        else std::cout << ": " << e.expr << " -> " << to_string(e.holds) << "\n";
    }
    if (reg.any_fails()) {
        std::cout << "a regularity condition vanishes identically\n";
        write_json(c, command, doc);
        return kNo;
    }
    if (!with_parameterization) {
        write_json(c, command, doc);
        return form.taint.empty() && reg.all_hold() ? kYes : kInconclusive;
    }

    FlatParameterization F = parameterize(form, o.sampling);
    doc["parameterization"] = to_json(F);
    if (!plan) {
        for (std::size_t k = 0; k < F.states.size(); ++k) std::cout << F.states[k].name() << " = " << F.F_x[k] << "\n";
        for (std::size_t k = 0; k < F.inputs.size(); ++k) std::cout << F.inputs[k].name() << " = " << F.F_u[k] << "\n";
        write_json(c, command, doc);
        return kYes;
    }

    auto jets = [](const std::string& spec, const char* what) {
        std::array<std::vector<double>, 3> out;
        std::istringstream comps(spec);
        std::string comp;
        std::size_t j = 0;
        while (std::getline(comps, comp, ';')) {
            if (j >= 3) throw InputError(std::string(what) + ": more than three components");
            std::istringstream vals(comp);
            std::string v;
            while (std::getline(vals, v, ',')) {
                try {
                    out[j].push_back(std::stod(v));
                } catch (const std::exception&) {
                    throw InputError(std::string(what) + ": bad number '" + v + "'");
                }
            }
            ++j;
        }
        if (j != 3) throw InputError(std::string(what) + ": expected three ';'-separated components");
        return out;
    };
    BoundaryJets b = ramp_rest_to_rest(0.05, 1.0, 0.05, plan->tf - plan->t0);
    if (!plan->start.empty()) b.start = jets(plan->start, "--start");
    if (!plan->end.empty()) b.end = jets(plan->end, "--end");
    PlanResult p;
    try {
        ReferenceJet ref = reference_jet(b, plan->t0, plan->tf, F.R);
        TimeGrid grid = make_grid(plan->t0, plan->tf, plan->dt);
        p = plan_and_validate(*rep.system, F, rep.candidate.phi, ref, grid);
    } catch (const PlannerError& e) {
        std::cout << "plan failed: " << e.what() << "\n";
        doc["plan"] = {{"error", e.what()}};
        write_json(c, command, doc);
        return kNo;
    }
    doc["plan"] = plan_summary(p);
    if (!plan->csv_out.empty()) {
        std::ofstream out(plan->csv_out, std::ios::binary);
        if (!out) throw InputError("cannot write " + plan->csv_out);
        write_plan_csv(p, out);
    }
    std::cout << "samples " << p.t.size() << ", sup error y1 " << p.sup_error[0] << ", y2 " << p.sup_error[1]
              << ", y3 " << p.sup_error[2] << "\n";
    write_json(c, command, doc);
    for (double e : p.sup_error)
        if (!(e <= plan->tol)) return kNo;
    return kYes;
}

// The file lists the z1, z2, z3 chains in order and names the chain heads
// as flat output; the states are taken as the chart.
int cmd_check_gtf3(const Common& c) {
    SystemFile f = load_for_analysis(c);
    std::array<int, 3> start{};
    for (std::size_t j = 0; j < 3; ++j) {
        int at = -1;
        for (std::size_t k = 0; k < f.system.n(); ++k)
            if (f.flat_output[j] == Expr(f.system.states[k])) at = static_cast<int>(k);
        if (at < 0) throw InputError("flat output component " + std::to_string(j + 1) + " is not a state");
        start[j] = at;
    }
    if (start[0] != 0 || !(start[1] > start[0]) || !(start[2] > start[1]))
        throw InputError("flat output must name the first state of each chain, chains in order");
    const std::array<int, 3> dims{start[1], start[2] - start[1], static_cast<int>(f.system.n()) - start[2]};

    AnalyzeOptions o = analyze_options(c, f);
    AnalysisReport rep = analyze(f.system, f.flat_output, o);
    Json doc{{"analysis", to_json(rep)}, {"dims", dims}};
    auto fail = [&](const std::string& why) {
        std::cout << "not in GTF3 shape: " << why << "\n";
        doc["violation"] = why;
        write_json(c, "check-gtf3", doc);
        return kNo;
    };
    if (!rep.verdict.is_yes()) {
        print_analysis(rep);
        write_json(c, "check-gtf3", doc);
        return exit_for(rep.verdict);
    }
    if (rep.candidate.permutation != std::array<int, 3>{0, 1, 2}) return fail("chains are not in the arranged order");
    const std::array<int, 3> want{rep.ds->K[0], rep.ds->p2, rep.ds->R[2]};
    if (want != dims)
        return fail("chain lengths (" + std::to_string(dims[0]) + "," + std::to_string(dims[1]) + "," +
                    std::to_string(dims[2]) + ") differ from the structural (" + std::to_string(want[0]) + "," +
                    std::to_string(want[1]) + "," + std::to_string(want[2]) + ")");
    GTF3Form form;
    try {
        form = build_transformation(identity_chart(*rep.system, dims), *rep.system, *rep.ds, o.sampling);
    } catch (const TriangularError& e) {
        std::string why = e.what();
        const std::string prefix = "internal inconsistency: ";
        if (why.rfind(prefix, 0) == 0) why.erase(0, prefix.size());
        return fail(why);
    }
    RegularityReport reg = check_regularity(form, o.sampling);
    doc["gtf3"] = to_json(form);
    doc["regularity"] = to_json(reg, form, hint_point(f.hints));
    std::cout << "dims (" << dims[0] << "," << dims[1] << "," << dims[2] << ")\n";
    if (reg.any_fails()) return fail("a regularity condition vanishes identically");
    write_json(c, "check-gtf3", doc);
    if (!form.taint.empty() || !reg.all_hold()) {
        std::cout << "undecided: " << (form.taint.empty() ? "regularity" : form.taint) << "\n";
        return kInconclusive;
    }
    std::cout << "GTF3 shape and regularity confirmed\n";
    return kYes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural flatness analysis for three-input control systems"};
    app.require_subcommand(1);
    Common c;
    PlanFlags pf;

    auto common = [&](CLI::App* sub, bool search) {
        sub->add_option("file", c.file, "system file")->required()->check(CLI::ExistingFile);
        sub->add_option("--json", c.json_out, "write the JSON report here ('-' for stdout)");
        sub->add_option("--seed", c.seed, "zero-test seed")->capture_default_str();
        sub->add_option("--samples", c.samples, "zero-test sample count")->capture_default_str()->check(CLI::PositiveNumber);
        if (search) sub->add_option("--cap", c.cap, "prolongation cap (default 2n - 6)")->check(CLI::NonNegativeNumber);
    };
    auto* analyze_cmd = app.add_subcommand("analyze", "indices, Q-sequence and verdict");
    common(analyze_cmd, false);
    auto* search_cmd = app.add_subcommand("prolong-search", "prolong until the verdict is yes or the cap is hit");
    common(search_cmd, true);
    auto* transform_cmd = app.add_subcommand("transform", "coordinate chart and triangular form");
    common(transform_cmd, true);
    auto* param_cmd = app.add_subcommand("parameterize", "states and inputs in flat-output jets");
    common(param_cmd, true);
    auto* plan_cmd = app.add_subcommand("plan", "feedforward plan and closed-loop replay");
    common(plan_cmd, true);
    plan_cmd->add_option("--t0", pf.t0)->capture_default_str();
    plan_cmd->add_option("--tf", pf.tf)->capture_default_str();
    plan_cmd->add_option("--dt", pf.dt)->capture_default_str();
    plan_cmd->add_option("--tol", pf.tol, "sup-norm tracking tolerance")->capture_default_str();
    plan_cmd->add_option("--csv", pf.csv_out, "write samples as CSV");
    plan_cmd->add_option("--start", pf.start, "jets at t0, e.g. '0;0,1;1'");
    plan_cmd->add_option("--end", pf.end, "jets at tf");
    auto* check_cmd = app.add_subcommand("check-gtf3", "check a system already written in triangular form");
    common(check_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kInputError;
    }

    try {
        if (analyze_cmd->parsed()) return cmd_analyze(c);
        if (search_cmd->parsed()) return cmd_prolong_search(c);
        if (transform_cmd->parsed()) return cmd_triangular(c, false, nullptr);
        if (param_cmd->parsed()) return cmd_triangular(c, true, nullptr);
        if (plan_cmd->parsed()) return cmd_triangular(c, true, &pf);
        if (check_cmd->parsed()) return cmd_check_gtf3(c);
    } catch (const ParseError& e) {
        std::cerr << c.file << ": " << e.what() << "\n";
        return kInputError;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const StructureError& e) {
        std::cerr << "no: " << e.what() << "\n";
        return kNo;
    } catch (const std::exception& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    }
    return kInputError;
}
