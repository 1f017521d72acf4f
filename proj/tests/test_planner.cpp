#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "sflat/flatness/analysis.hpp"
#include "sflat/planner/planner.hpp"
#include "sflat/prolongation/prolongation.hpp"
#include "sflat/symbolic/parser.hpp"

using namespace sflat;

namespace {

struct Lifted {
    AnalysisReport rep;
    TriangularResult tri;
};

const Lifted& lifted() {
    static const Lifted l = [] {
        Lifted r;
        r.rep = analyze(affine_lift(fixtures::example2()), fixtures::example2_output());
        r.tri = triangularize(r.rep);
        return r;
    }();
    return l;
}

double max_of(const std::array<double, 3>& a) { return std::max({a[0], a[1], a[2]}); }

}  // namespace

TEST(Reference, HermiteMatchesBoundaryJets) {
    BoundaryJets b;
    b.start = {std::vector<double>{0.3, -1.0, 2.0}, std::vector<double>{1.0}, std::vector<double>{0.0, 0.5}};
    b.end = {std::vector<double>{1.2, 0.0, -0.5}, std::vector<double>{-1.0, 2.0}, std::vector<double>{4.0}};
    const std::array<int, 3> R{3, 2, 4};
    auto ref = reference_jet(b, 0.5, 2.0, R);
    for (int c = 1; c <= 3; ++c) {
        const auto j = static_cast<std::size_t>(c - 1);
        EXPECT_EQ(ref.degree(c), 2 * R[j] - 1);
        EXPECT_GE(ref.degree(c), R[j]);
        for (int l = 0; l < R[j]; ++l) {
            auto at = [&](const std::vector<double>& v) { return l < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(l)] : 0.0; };
            EXPECT_NEAR(ref.value(c, l, 0.5), at(b.start[j]), 1e-10) << c << " " << l;
            EXPECT_NEAR(ref.value(c, l, 2.0), at(b.end[j]), 1e-10) << c << " " << l;
        }
    }
}

TEST(Reference, DerivativesAgreeWithFiniteDifferences) {
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, {5, 4, 5});
    const double h = 1e-5;
    for (int c = 1; c <= 3; ++c)
        for (int l = 0; l < 5; ++l)
            for (double t : {0.2, 0.5, 0.9}) {
                const double fd = (ref.value(c, l, t + h) - ref.value(c, l, t - h)) / (2 * h);
                EXPECT_NEAR(ref.value(c, l + 1, t), fd, 1e-5 * std::max(1.0, std::abs(fd)));
            }
}

TEST(Reference, DegreesCoverR) {
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, {5, 4, 5});
    EXPECT_GE(ref.degree(1), 5);
    EXPECT_GE(ref.degree(2), 4);
    EXPECT_GE(ref.degree(3), 5);
    // The ramp is reproduced exactly by the interpolant.
    for (double t : {0.0, 0.3, 1.0}) {
        EXPECT_NEAR(ref.value(2, 0, t), t, 1e-12);
        EXPECT_NEAR(ref.value(2, 1, t), 1.0, 1e-11);
    }
}

TEST(Reference, EmptyHorizon) {
    BoundaryJets b;
    b.start = {std::vector<double>{1.0}, std::vector<double>{2.0}, std::vector<double>{3.0}};
    b.end = b.start;
    auto ref = reference_jet(b, 1.0, 1.0, {2, 2, 2});
    EXPECT_EQ(ref.value(2, 0, 1.0), 2.0);
    EXPECT_EQ(ref.value(2, 1, 1.0), 0.0);
    b.end[0][0] = 1.5;
    EXPECT_THROW(reference_jet(b, 1.0, 1.0, {2, 2, 2}), PlannerError);
}

TEST(Reference, RejectsJetsAboveR) {
    BoundaryJets b;
    b.start = {std::vector<double>{0.0, 0.0, 0.0}, std::vector<double>{0.0}, std::vector<double>{0.0}};
    b.end = b.start;
    EXPECT_THROW(reference_jet(b, 0.0, 1.0, {2, 2, 2}), PlannerError);
}

TEST(Grid, StepMustDivideHorizon) {
    EXPECT_EQ(make_grid(0.0, 1.0, 1e-3).steps, 1000u);
    EXPECT_THROW(make_grid(0.0, 1.0, 0.3), PlannerError);
    EXPECT_THROW(make_grid(0.0, 1.0, 0.0), PlannerError);
}

TEST(Integrate, ExponentialReachesE) {
    auto f = [](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
    auto xs = integrate(f, Eigen::VectorXd::Ones(1), make_grid(0.0, 1.0, 1e-3));
    EXPECT_NEAR(xs.back()[0], std::exp(1.0), 1e-8);
}

TEST(Integrate, FourthOrder) {
    auto f = [](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd d(2);
        d << x[1], -x[0] + std::cos(t);
        return d;
    };
    Eigen::VectorXd x0(2);
    x0 << 1.0, 0.0;
    // x'' + x = cos t with x(0) = 1, x'(0) = 0.
    auto exact = [](double t) { return std::cos(t) + 0.5 * t * std::sin(t); };
    auto err = [&](double h) {
        auto xs = integrate(f, x0, make_grid(0.0, 2.0, h));
        return std::abs(xs.back()[0] - exact(2.0));
    };
    const double ratio = std::log2(err(2e-2) / err(1e-2));
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(Integrate, NonFiniteStateAborts) {
    auto sys = fixtures::make_system({"x1"}, {"u1"}, {"x1^2"});
    auto u = [](double) { return Eigen::VectorXd::Zero(1); };
    try {
        integrate(sys, u, Eigen::VectorXd::Constant(1, 1.0), make_grid(0.0, 2.0, 0.01));
        FAIL() << "blow-up not detected";
    } catch (const PlannerError& e) {
        EXPECT_NE(std::string(e.what()).find("t="), std::string::npos);
    }
}

TEST(Planner, LiftedExample2Tracks) {
    const auto& L = lifted();
    ASSERT_TRUE(L.tri.parameterization);
    const auto& F = *L.tri.parameterization;
    const auto start = std::chrono::steady_clock::now();
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, F.R);
    auto plan = plan_and_validate(*L.rep.system, F, L.rep.candidate.phi, ref, make_grid(0.0, 1.0, 1e-3));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (double e : plan.sup_error) EXPECT_LE(e, 1e-6);
    EXPECT_LT(secs, 10.0);
    EXPECT_EQ(plan.t.size(), 1001u);
}

TEST(Planner, FaultInjectionIsDetected) {
    const auto& L = lifted();
    FlatParameterization F = *L.tri.parameterization;
    F.F_x[2] = F.F_x[2] + Expr(Rational(1, 10));
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, F.R);
    auto plan = plan_and_validate(*L.rep.system, F, L.rep.candidate.phi, ref, make_grid(0.0, 1.0, 1e-3));
    EXPECT_GT(max_of(plan.sup_error), 1e-3);
}

TEST(Planner, InitialStateReproducesJets) {
    const auto& L = lifted();
    const auto& F = *L.tri.parameterization;
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, F.R);
    auto ff = feedforward(F, ref, make_grid(0.0, 1.0, 0.5));
    const auto& sys = *L.rep.system;
    const auto& K = L.rep.candidate.K;
    Point q;
    for (std::size_t k = 0; k < sys.n(); ++k) q.set(sys.states[k].var(), ff.x[0][static_cast<Eigen::Index>(k)]);
    // State-only jets of phi are phi, L_f phi, ... up to order K^j - 1.
    for (int c = 1; c <= 3; ++c) {
        Expr jet = L.rep.candidate.phi[static_cast<std::size_t>(c - 1)];
        for (int l = 0; l < K[static_cast<std::size_t>(c - 1)]; ++l) {
            EXPECT_NEAR(evaluate(jet, q).value(), ref.value(c, l, 0.0), 1e-9) << c << " " << l;
            Expr next;
            for (std::size_t k = 0; k < sys.n(); ++k) next = next + differentiate(jet, sys.states[k].var()) * sys.dynamics[k];
            jet = next;
        }
    }
}

TEST(Planner, ErrorShrinksWithStep) {
    const auto& L = lifted();
    const auto& F = *L.tri.parameterization;
    auto ref = reference_jet(ramp_rest_to_rest(0.05, 1.0, 0.05), 0.0, 1.0, F.R);
    double prev = INFINITY;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        auto plan = plan_and_validate(*L.rep.system, F, L.rep.candidate.phi, ref, make_grid(0.0, 1.0, h));
        const double e = max_of(plan.sup_error);
        EXPECT_LE(e, 1.1 * prev) << h;
        prev = e;
    }
}

TEST(Planner, LiteralRestToRestHitsGuard) {
    const auto& L = lifted();
    const auto& F = *L.tri.parameterization;
    BoundaryJets b;
    b.start = {std::vector<double>{0.0}, std::vector<double>{0.0}, std::vector<double>{0.0}};
    b.end = {std::vector<double>{1.0}, std::vector<double>{1.0}, std::vector<double>{1.0}};
    auto ref = reference_jet(b, 0.0, 1.0, F.R);
    try {
        feedforward(F, ref, make_grid(0.0, 1.0, 1e-3));
        FAIL() << "singular reference accepted";
    } catch (const PlannerError& e) {
        EXPECT_NE(std::string(e.what()).find("vanishes at t=0"), std::string::npos) << e.what();
    }
}

TEST(Planner, CsvHasHeaderAndRows) {
    auto rep = analyze(fixtures::chains(2, 1, 3), fixtures::chains_output());
    auto tri = triangularize(rep);
    const auto& F = *tri.parameterization;
    BoundaryJets b;
    b.start = {std::vector<double>{0.0}, std::vector<double>{1.0}, std::vector<double>{0.0}};
    b.end = {std::vector<double>{1.0}, std::vector<double>{0.0}, std::vector<double>{2.0}};
    auto plan = plan_and_validate(*rep.system, F, rep.candidate.phi, reference_jet(b, 0.0, 1.0, F.R),
                                  make_grid(0.0, 1.0, 1e-3));
    for (double e : plan.sup_error) EXPECT_LE(e, 1e-10);
    std::ostringstream os;
    write_plan_csv(plan, os);
    std::istringstream is(os.str());
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header.rfind("t,y1,y2,y3,ff_", 0), 0u);
    EXPECT_NE(header.find(",e1,e2,e3"), std::string::npos);
    int rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    EXPECT_EQ(rows, 1001);
}
