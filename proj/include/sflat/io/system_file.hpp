#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sflat/geometry/system_model.hpp"
#include "sflat/symbolic/parser.hpp"
#include "sflat/triangular/triangular.hpp"

namespace sflat {

struct SystemHints {
    /// Named chart candidates, tried before the state coordinates.
    std::vector<NamedExpr> coordinates;
    std::optional<Expr> phi_u2;
    /// Operating point for regularity values (states and inputs by name).
    std::vector<std::pair<std::string, Rational>> point;

    bool empty() const { return coordinates.empty() && !phi_u2 && point.empty(); }
};

struct SystemFile {
    SystemModel system;
    std::vector<Expr> flat_output;
    SystemHints hints;
};

/// Parses the sectioned text format:
///
///   [states]       x1, x2, ...
///   [inputs]       u1, u2, u3
///   [dynamics]     x1' = expr      (one line per state)
///   [flat_output]  expr            (one line per component)
///   [hints]        name = expr | phi_u2 = expr | point = x1:0, x2:1/2
///
/// `#` starts a comment. Errors are ParseError with line and column.
SystemFile parse_system(const std::string& text);

/// Reads and parses a file; an unreadable file is a ParseError at line 0.
SystemFile load_system(const std::string& path);

/// Canonical text; parse_system(print_system(f)) reproduces f.
std::string print_system(const SystemFile& f);

/// Point binding the hinted operating point, nullopt when none is given.
std::optional<Point> hint_point(const SystemHints& h);

}  // namespace sflat
