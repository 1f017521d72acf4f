#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "sflat/symbolic/expr.hpp"

namespace sflat {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column);
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses the expression grammar (+ - * / ^, unary minus, sin cos tan exp log
/// sqrt, exact integer/decimal literals). Identifiers must be in `symbols`.
/// `line` and `column_offset` position errors inside a larger file.
Expr parse_expr(const std::string& text, const std::set<std::string>& symbols, std::size_t line = 1,
                std::size_t column_offset = 0);

/// Same grammar; any identifier is accepted as a symbol.
Expr parse_expr(const std::string& text);

bool is_identifier(const std::string& s);
bool is_reserved_name(const std::string& s);

}  // namespace sflat
