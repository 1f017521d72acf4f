#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "random_expr.hpp"
#include "sflat/geometry/exterior.hpp"
#include "wedge_oracle.hpp"

using namespace sflat;

namespace {

Expr P(const std::string& s) { return parse_expr(s); }

std::shared_ptr<const ExtendedSpace> plain_space(const std::vector<std::string>& names) {
    std::vector<Symbol> st;
    for (const auto& n : names) st.emplace_back(n, SymbolKind::State);
    return std::make_shared<const ExtendedSpace>(st, std::vector<Symbol>{}, 0);
}

}  // namespace

TEST(ExtendedVectorField, Example2Coefficients) {
    auto sys = fixtures::example2();
    VectorField v = extended_vector_field(sys, 0);
    EXPECT_EQ(v.coeffs.size(), 10u);
    EXPECT_EQ(v.coeffs[1], P("x3 + x4*u1"));
    EXPECT_TRUE(v.coeffs[7].is_zero());
}

TEST(ExtendedVectorField, JetShift) {
    auto sys = fixtures::make_system({"x1", "x2"}, {"u"}, {"x2", "u"});
    VectorField v = extended_vector_field(sys, 2);
    ASSERT_EQ(v.space->dim(), 5u);
    EXPECT_EQ(v.coeffs[0], P("x2"));
    EXPECT_EQ(v.coeffs[1], P("u"));
    EXPECT_EQ(v.coeffs[2], P("u_d1"));
    EXPECT_EQ(v.coeffs[3], P("u_d2"));
    EXPECT_TRUE(v.coeffs[4].is_zero());
}

TEST(LieScalar, Example2) {
    VectorField v = extended_vector_field(fixtures::example2(), 1);
    EXPECT_EQ(lie_scalar(v, P("x5")), P("-x6 + x4*x7*u1"));
    EXPECT_TRUE(lie_scalar(v, P("7/3")).is_zero());
    EXPECT_EQ(lie_scalar(v, lie_scalar(v, P("x1"))), P("u1_d1"));
}

TEST(ExteriorDerivative, Examples) {
    auto sp = plain_space({"x3", "x4", "x5"});
    OneForm contact{{P("x4"), P("0"), P("0")}};
    TwoForm d = exterior_derivative(contact, *sp);
    // c_ij = d_i w_j - d_j w_i; d(x4 dx3) = dx4 ^ dx3, i.e. c_{x3,x4} = -1.
    EXPECT_EQ(d.at(1, 0), Expr(1));
    EXPECT_EQ(d.at(0, 1), Expr(-1));

    std::vector<Symbol> st{{"x3", SymbolKind::State}, {"x4", SymbolKind::State}};
    std::vector<Symbol> in{{"u1", SymbolKind::Input}};
    ExtendedSpace s2(st, in, 0);
    OneForm w{{P("1"), P("u1"), P("0")}};
    TwoForm d2 = exterior_derivative(w, s2);
    EXPECT_EQ(d2.at(2, 1), Expr(1));  // du1 ^ dx4
    EXPECT_EQ(d2.coeffs.size(), 1u);
}

TEST(ExteriorDerivative, ClosedOnExactFormsProperty) {
    auto sp = plain_space({"a", "b", "c", "d"});
    fixtures::ExprGen gen(11, {"a", "b", "c", "d"});
    for (int t = 0; t < 60; ++t) {
        Expr h = gen(4);
        TwoForm dd = exterior_derivative(differential(h, *sp), *sp);
        EXPECT_TRUE(dd.is_zero()) << h;
    }
}

TEST(Frobenius, ExactSpanIntegrable) {
    auto sp = plain_space({"a", "b", "c", "d"});
    Codistribution d = Codistribution::of_differentials(sp, {P("a*b + c"), P("sin(d)*a")});
    EXPECT_TRUE(frobenius_integrable(d).verdict.is_yes());
}

TEST(Frobenius, ContactFormRejected) {
    auto sp = plain_space({"x3", "x4", "x5"});
    Codistribution d = Codistribution::span(sp, std::vector<OneForm>{{{P("1"), P("-x5"), P("0")}}});
    FrobeniusResult r = frobenius_integrable(d);
    ASSERT_TRUE(r.verdict.is_no());
    ASSERT_FALSE(r.verdict.certificate.empty());
    Point p;
    p.set(var_of("x3"), 0.3), p.set(var_of("x4"), -0.7), p.set(var_of("x5"), 1.1);
    EXPECT_NEAR(fixtures::max_wedge_coefficient(d, p), 1.0, 1e-12);
}

TEST(Intersect, Basics) {
    std::vector<Symbol> st{{"x1", SymbolKind::State}};
    std::vector<Symbol> in{{"u1", SymbolKind::Input}};
    auto sp = std::make_shared<const ExtendedSpace>(st, in, 0);
    Codistribution p = Codistribution::span(sp, std::vector<OneForm>{{{P("1"), P("1")}}, {{P("0"), P("1")}}});
    Codistribution q = intersect_with_state_span(p);
    ASSERT_EQ(q.rank(), 1u);
    EXPECT_TRUE(q.within_state_span());
    EXPECT_TRUE(contains(p, q));

    Codistribution inside = Codistribution::span(sp, std::vector<OneForm>{{{P("x1"), P("0")}}});
    EXPECT_EQ(intersect_with_state_span(inside).rank(), 1u);
}

TEST(Corank, Basics) {
    auto sp = plain_space({"a", "b", "c"});
    Codistribution small = Codistribution::of_differentials(sp, {P("a")});
    Codistribution big = Codistribution::of_differentials(sp, {P("a"), P("b*c")});
    EXPECT_EQ(corank(small, big), 1u);
    EXPECT_EQ(corank(big, big), 0u);
    Codistribution other = Codistribution::of_differentials(sp, {P("c")});
    EXPECT_THROW(corank(other, big), ContainmentError);
}
