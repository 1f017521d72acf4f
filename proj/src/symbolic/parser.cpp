#include "sflat/symbolic/parser.hpp"

#include <cctype>

namespace sflat {

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

const std::map<std::string, Func>& functions() {
    static const std::map<std::string, Func> table = {
        {"sin", Func::Sin}, {"cos", Func::Cos}, {"tan", Func::Tan},
        {"exp", Func::Exp}, {"log", Func::Log}, {"sqrt", Func::Pow},
    };
    return table;
}

enum class Tok { Number, Ident, Op, LParen, RParen, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

class Parser {
public:
    Parser(const std::string& text, const std::set<std::string>* symbols, std::size_t line, std::size_t offset)
        : text_(text), symbols_(symbols), line_(line), offset_(offset) {
        advance();
    }

    Expr parse() {
        Expr e = expression(0);
        if (tok_.kind != Tok::End) fail("unexpected '" + tok_.text + "'", tok_.pos);
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t pos) const {
        throw ParseError(msg, line_, offset_ + pos + 1);
    }

    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
        if (i_ >= text_.size()) {
            tok_ = {Tok::End, "end of input", i_};
            return;
        }
        const std::size_t start = i_;
        const char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            bool dot = false;
            while (i_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[i_])) || text_[i_] == '.')) {
                if (text_[i_] == '.') {
                    if (dot) fail("malformed number", i_);
                    dot = true;
                }
                ++i_;
            }
            tok_ = {Tok::Number, text_.substr(start, i_ - start), start};
            if (tok_.text == ".") fail("malformed number", start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i_])) || text_[i_] == '_')) ++i_;
            tok_ = {Tok::Ident, text_.substr(start, i_ - start), start};
            return;
        }
        ++i_;
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                tok_ = {Tok::Op, std::string(1, c), start};
                return;
            case '(':
                tok_ = {Tok::LParen, "(", start};
                return;
            case ')':
                tok_ = {Tok::RParen, ")", start};
                return;
            default:
                fail(std::string("unexpected character '") + c + "'", start);
        }
    }

    static int binding_power(const std::string& op) {
        if (op == "+" || op == "-") return 10;
        if (op == "*" || op == "/") return 20;
        if (op == "^") return 40;
        return -1;
    }

    static Rational number(const std::string& s) {
        auto dot = s.find('.');
        if (dot == std::string::npos) return Rational(mpz_class(s, 10));
        std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
        if (whole.empty()) whole = "0";
        mpz_class scale = 1;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
        Rational r(mpz_class(whole + frac, 10), scale);
        r.canonicalize();
        return r;
    }

    Expr expression(int min_bp) {
        Expr lhs = prefix();
        while (tok_.kind == Tok::Op) {
            const std::string op = tok_.text;
            const int bp = binding_power(op);
            if (bp < min_bp || bp <= 0) break;
            const std::size_t pos = tok_.pos;
            advance();
            if (op == "^") {
                // Right associative; the exponent may carry a unary sign.
                Expr rhs = expression(bp);
                if (!rhs.is_constant()) fail("exponent must be a rational constant", pos);
                lhs = power(lhs, rhs.constant_value(), pos);
                continue;
            }
            Expr rhs = expression(bp + 1);
            if (op == "+") lhs = lhs + rhs;
            else if (op == "-") lhs = lhs - rhs;
            else if (op == "*") lhs = lhs * rhs;
            else {
                if (rhs.is_zero()) fail("division by zero", pos);
                lhs = lhs / rhs;
            }
        }
        return lhs;
    }

    Expr power(const Expr& base, const Rational& r, std::size_t pos) {
        if (base.is_zero() && r < 0) fail("zero raised to a negative power", pos);
        return base.pow(r);
    }

    Expr prefix() {
        const Token t = tok_;
        switch (t.kind) {
            case Tok::Number:
                advance();
                return Expr(number(t.text));
            case Tok::Ident: {
                advance();
                auto f = functions().find(t.text);
                if (f != functions().end()) {
                    if (tok_.kind != Tok::LParen) fail("expected '(' after " + t.text, tok_.pos);
                    advance();
                    Expr arg = expression(0);
                    expect_rparen();
                    try {
                        return f->second == Func::Pow ? sqrt(arg) : apply(f->second, arg);
                    } catch (const std::domain_error& e) {
                        fail(e.what(), t.pos);
                    }
                }
                if (symbols_ && !symbols_->count(t.text)) fail("unknown identifier '" + t.text + "'", t.pos);
                return Expr::symbol(t.text);
            }
            case Tok::Op:
                if (t.text == "-") {
                    advance();
                    // Unary minus binds looser than ^ and tighter than * /.
                    return -expression(30);
                }
                if (t.text == "+") {
                    advance();
                    return expression(30);
                }
                break;
            case Tok::LParen: {
                advance();
                Expr e = expression(0);
                expect_rparen();
                return e;
            }
            default:
                break;
        }
        fail("unexpected '" + t.text + "'", t.pos);
    }

    void expect_rparen() {
        if (tok_.kind != Tok::RParen) fail("expected ')'", tok_.pos);
        advance();
    }

    const std::string& text_;
    const std::set<std::string>* symbols_;
    std::size_t line_, offset_;
    std::size_t i_ = 0;
    Token tok_{Tok::End, "", 0};
};

}  // namespace

Expr parse_expr(const std::string& text, const std::set<std::string>& symbols, std::size_t line,
                std::size_t column_offset) {
    return Parser(text, &symbols, line, column_offset).parse();
}

Expr parse_expr(const std::string& text) { return Parser(text, nullptr, 1, 0).parse(); }

bool is_reserved_name(const std::string& s) { return functions().count(s) > 0; }

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

}  // namespace sflat
