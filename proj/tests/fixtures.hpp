#pragma once

#include <string>
#include <vector>

#include "sflat/geometry/system_model.hpp"
#include "sflat/symbolic/parser.hpp"

namespace fixtures {

inline sflat::SystemModel make_system(const std::vector<std::string>& states, const std::vector<std::string>& inputs,
                                      const std::vector<std::string>& dynamics) {
    sflat::SystemModel sys;
    for (const auto& s : states) sys.states.emplace_back(s, sflat::SymbolKind::State);
    for (const auto& u : inputs) sys.inputs.emplace_back(u, sflat::SymbolKind::Input);
    for (const auto& d : dynamics) sys.dynamics.push_back(sflat::parse_expr(d));
    sys.affine = sflat::affine_decomposition(sys);
    return sys;
}

inline sflat::SystemModel example2() {
    return make_system({"x1", "x2", "x3", "x4", "x5", "x6", "x7"}, {"u1", "u2", "u3"},
                       {"u1", "x3 + x4*u1", "u2 - u1*u3", "u3", "-x6 + x4*x7*u1",
                        "-x5*u1 + x7*(u1*u3 - u2 - 1) + (x4 + u1)*x4*u1", "x4 + u1"});
}

inline std::vector<sflat::Expr> example2_output() {
    return {sflat::parse_expr("x2"), sflat::parse_expr("x1"), sflat::parse_expr("x5")};
}

/// Three independent integrator chains of lengths a, b, c.
inline sflat::SystemModel chains(int a, int b, int c) {
    std::vector<std::string> st, dyn;
    const int len[3] = {a, b, c};
    const char* base[3] = {"p", "q", "r"};
    for (int j = 0; j < 3; ++j)
        for (int i = 1; i <= len[j]; ++i) {
            st.push_back(std::string(base[j]) + std::to_string(i));
            dyn.push_back(i < len[j] ? std::string(base[j]) + std::to_string(i + 1) : "v" + std::to_string(j + 1));
        }
    return make_system(st, {"v1", "v2", "v3"}, dyn);
}

inline std::vector<sflat::Expr> chains_output() {
    return {sflat::parse_expr("p1"), sflat::parse_expr("q1"), sflat::parse_expr("r1")};
}

/// Triangular system with dims (2,2,4), K = (2,2,2) and P = K.
inline sflat::SystemModel example1_shape() {
    return make_system({"a1", "a2", "b1", "b2", "c1", "c2", "c3", "c4"}, {"w1", "w2", "w3"},
                       {"a2", "w1", "b2", "w2", "c2", "c3 + (1 + b1^2)*w1 + a1*w2", "c4 + c2*w1 + b1*w2", "w3"});
}

inline std::vector<sflat::Expr> example1_output() {
    return {sflat::parse_expr("a1"), sflat::parse_expr("b1"), sflat::parse_expr("c1")};
}

}  // namespace fixtures
