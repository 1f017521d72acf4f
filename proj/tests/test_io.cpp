#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "sflat/io/report.hpp"
#include "sflat/io/system_file.hpp"

using namespace sflat;
namespace fs = std::filesystem;

namespace {

const std::string kData = SFLAT_DATA_DIR;

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sflat_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

fs::path write_scratch(const std::string& name, const std::string& text) {
    const fs::path p = scratch(name);
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SFLAT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmall = R"([states]
x1, x2
[inputs]
u1
[dynamics]
x1' = x2
x2' = u1
[flat_output]
x1
)";

void expect_parse_error(const std::string& text, std::size_t line, std::size_t column, const std::string& fragment) {
    try {
        parse_system(text);
        ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), line) << e.what();
        EXPECT_EQ(e.column(), column) << e.what();
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(SystemFile, Example2Fixture) {
    auto f = load_system(kData + "/example2.sys");
    ASSERT_EQ(f.system.n(), 7u);
    ASSERT_EQ(f.system.m(), 3u);
    const auto ref = fixtures::example2();
    for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(f.system.dynamics[k], ref.dynamics[k]) << k;
    EXPECT_EQ(f.flat_output, fixtures::example2_output());
    EXPECT_TRUE(f.hints.empty());
    EXPECT_FALSE(f.system.affine.has_value());
}

TEST(SystemFile, Precedence) {
    auto f = load_system(kData + "/example2.sys");
    EXPECT_EQ(f.system.dynamics[2], Expr::symbol("u2") - Expr::symbol("u1") * Expr::symbol("u3"));
    auto g = parse_system(std::string(kSmall).replace(std::string(kSmall).find("x2' = u1"), 8,
                                                      "x2' = -x1^2^1 + 2*x2/3 - u1"));
    EXPECT_EQ(g.system.dynamics[1], -Expr::symbol("x1").pow(2L) + Expr(Rational(2, 3)) * Expr::symbol("x2") -
                                        Expr::symbol("u1"));
}

TEST(SystemFile, HintsParse) {
    auto f = parse_system(std::string(kSmall) +
                          "[hints]\nzeta = x1 + u1_d1  # chart candidate\nphi_u2 = x2\npoint = x1:1/2, u1:-3\n");
    ASSERT_EQ(f.hints.coordinates.size(), 1u);
    EXPECT_EQ(f.hints.coordinates[0].name, "zeta");
    EXPECT_EQ(f.hints.coordinates[0].value, Expr::symbol("x1") + Expr::symbol("u1_d1"));
    ASSERT_TRUE(f.hints.phi_u2);
    ASSERT_EQ(f.hints.point.size(), 2u);
    EXPECT_EQ(f.hints.point[0].second, Rational(1, 2));
    auto p = hint_point(f.hints);
    ASSERT_TRUE(p);
    EXPECT_DOUBLE_EQ(p->get(var_of("u1")), -3.0);
}

TEST(SystemFile, Errors) {
    expect_parse_error("[states]\nx1\n[inputs]\nu1\n[dynamics]\nx1' = u1 +* 2\n", 6, 11, "unexpected");
    expect_parse_error("[states]\nx1\n[inputs]\nu1\n[dynamics]\nx1' = u1 + y\n", 6, 12, "unknown identifier 'y'");
    expect_parse_error("[states]\nx1, x2\n[inputs]\nu1\n[dynamics]\nx1' = u1\n", 5, 1, "no dynamics line for state x2");
    expect_parse_error("[states]\nx1\n[inputs]\nu1\n[dynamics]\nx1' = u1\nx1' = 0\n", 7, 1, "second dynamics line");
    expect_parse_error("[states]\nx1, x1\n[inputs]\nu1\n[dynamics]\n", 2, 5, "declared twice");
    expect_parse_error("[states]\nx1\n[inputs]\nu1\n", 4, 1, "missing section [dynamics]");
    expect_parse_error("[states]\nx1\n[inputs]\nu1\n[dynamics]\nx1' = u1\n[flat_output]\n u1\n", 8, 2, "states only");
    expect_parse_error("[states]\nsin\n[inputs]\nu1\n[dynamics]\n", 2, 1, "reserved");
    expect_parse_error("[bogus]\n", 1, 1, "unknown section");
    expect_parse_error("[states]\nx1\n[inputs]\nu1\n[dynamics]\nx2' = u1\n", 6, 1, "not a declared state");
    EXPECT_THROW(load_system(kData + "/does_not_exist.sys"), ParseError);
}

TEST(SystemFile, RoundTripFixpoint) {
    int files = 0;
    for (const auto& e : fs::directory_iterator(kData)) {
        if (e.path().extension() != ".sys") continue;
        ++files;
        SCOPED_TRACE(e.path().string());
        auto f = load_system(e.path().string());
        const std::string once = print_system(f);
        auto g = parse_system(once);
        EXPECT_EQ(print_system(g), once);
        EXPECT_EQ(g.system.dynamics, f.system.dynamics);
        EXPECT_EQ(g.flat_output, f.flat_output);
        EXPECT_EQ(g.hints.point, f.hints.point);
    }
    EXPECT_GE(files, 3);
}

TEST(Report, ProlongedExample2Document) {
    auto f = load_system(kData + "/example2.sys");
    auto s = iterative_search(f.system, f.flat_output);
    const Json doc = report_document("prolong-search", to_json(s));
    EXPECT_EQ(doc["schema_version"], kReportSchemaVersion);
    EXPECT_EQ(doc["analysis"]["A"], Json::parse("[[1,1,1],[2,1,2],[3,2,3],[4,3,4]]"));
    EXPECT_EQ(doc["analysis"]["coranks"], Json::parse("[1,2,1]"));
    EXPECT_EQ(doc["analysis"]["verdict"]["value"], "yes");
    EXPECT_EQ(doc["verdict"]["value"], "yes");
    EXPECT_EQ(doc["prolongation"]["history"].size(), 1u);
    for (const auto& lvl : doc["analysis"]["integrability"]) {
        EXPECT_EQ(lvl["value"], "yes");
        EXPECT_FALSE(lvl["reason"].get<std::string>().empty());
    }
    const std::string text = emit_report(doc);
    EXPECT_NE(text.find("\"A\": ["), std::string::npos);
    EXPECT_EQ(Json::parse(text), doc);
    // Same seed, same bytes.
    auto again = iterative_search(f.system, f.flat_output);
    EXPECT_EQ(emit_report(report_document("prolong-search", to_json(again))), text);
}

TEST(Report, EmptyHintsRoundTrip) {
    auto f = parse_system(std::string(kSmall));
    const Json doc = report_document("system", to_json(f.system));
    EXPECT_EQ(Json::parse(emit_report(doc)), doc);
}

TEST(Report, KeysSorted) {
    Json j{{"zeta", 1}, {"alpha", 2}, {"mid", 3}};
    const std::string s = emit_report(j);
    EXPECT_LT(s.find("alpha"), s.find("mid"));
    EXPECT_LT(s.find("mid"), s.find("zeta"));
}

TEST(Cli, ExitCodes) {
    const std::string ex2 = kData + "/example2.sys";
    const fs::path json = scratch("analyze.json");
    EXPECT_EQ(run_cli("analyze " + ex2 + " --json " + json.string()), 2);
    const Json a = Json::parse(read_file(json));
    EXPECT_EQ(a["verdict"]["reason"], "not control-affine; use prolong-search");
    EXPECT_EQ(a["command"], "analyze");

    EXPECT_EQ(run_cli("prolong-search " + ex2), 0);
    EXPECT_EQ(run_cli("transform " + ex2), 0);
    EXPECT_EQ(run_cli("analyze " + kData + "/example1_shape.sys"), 0);
    EXPECT_EQ(run_cli("check-gtf3 " + kData + "/example2_gtf3.sys"), 0);

    const auto nonflat = write_scratch("nonflat.sys",
                                       "[states]\nx1,x2,x3,x4\n[inputs]\nu1,u2,u3\n[dynamics]\nx1' = u1\nx2' = u2\n"
                                       "x3' = u3\nx4' = x4*u1\n[flat_output]\nx1\nx2\nx3\n");
    EXPECT_EQ(run_cli("prolong-search " + nonflat.string()), 1);
    const auto broken = write_scratch("broken.sys", "[states]\nx1\n[inputs]\nu1\n[dynamics]\nx1' = (u1\n");
    EXPECT_EQ(run_cli("analyze " + broken.string()), 3);
    EXPECT_EQ(run_cli("analyze " + scratch("missing.sys").string()), 3);
    EXPECT_EQ(run_cli("analyze " + ex2 + " --samples 0"), 3);
    EXPECT_EQ(run_cli("frobnicate " + ex2), 3);
}

TEST(Cli, CheckGtf3RejectsForbiddenDependency) {
    // Same system, but the third chain is declared out of order.
    std::string text = read_file(kData + "/example1_shape.sys");
    const std::string decl = "c1, c2, c3, c4";
    text.replace(text.find(decl), decl.size(), "c1, c3, c2, c4");
    const auto p = write_scratch("bad_gtf3.sys", text);
    const fs::path json = scratch("bad_gtf3.json");
    EXPECT_EQ(run_cli("check-gtf3 " + p.string() + " --json " + json.string()), 1);
    const Json j = Json::parse(read_file(json));
    EXPECT_EQ(j["violation"], "row z3^1 is z3_3, expected z3_2");
    EXPECT_EQ(run_cli("check-gtf3 " + kData + "/example1_shape.sys"), 0);
}

TEST(Cli, PlanWritesCsvAndSummary) {
    const fs::path csv = scratch("plan.csv"), json = scratch("plan.json");
    EXPECT_EQ(run_cli("plan " + kData + "/example2.sys --t0 0 --tf 1 --dt 1e-3 --csv " + csv.string() + " --json " +
                      json.string()),
              0);
    const Json j = Json::parse(read_file(json));
    EXPECT_EQ(j["plan"]["samples"], 1001);
    for (const auto& e : j["plan"]["sup_error"]) EXPECT_LE(e.get<double>(), 1e-6);
    std::istringstream rows(read_file(csv));
    std::string header;
    std::getline(rows, header);
    EXPECT_EQ(header.rfind("t,y1,y2,y3,", 0), 0u);
    // The literal rest-to-rest plan hits the u1 = 0 guard.
    EXPECT_EQ(run_cli("plan " + kData + "/example2.sys --start '0;0;0' --end '1;1;1'"), 1);
}

TEST(Cli, DeterministicJson) {
    const fs::path a = scratch("det_a.json"), b = scratch("det_b.json");
    const std::string ex2 = kData + "/example2.sys";
    ASSERT_EQ(run_cli("transform " + ex2 + " --seed 7 --json " + a.string()), 0);
    ASSERT_EQ(run_cli("transform " + ex2 + " --seed 7 --json " + b.string()), 0);
    EXPECT_EQ(read_file(a), read_file(b));
}
