#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace sflat {

using Rational = mpq_class;

/// Interned variable id. Every symbol and every transcendental kernel
/// (sin(e), exp(e), e^(1/2), ...) is a polynomial indeterminate with a Var id.
using Var = std::uint32_t;

enum class SymbolKind { State, Input, InputJet, FlatJet, Parameter };

const char* to_string(SymbolKind kind);

/// A named variable. Identity is the name; kind and jet order are metadata
/// that the owning model interprets (a prolonged input becomes a state).
struct Symbol {
    std::string base;
    SymbolKind kind = SymbolKind::State;
    unsigned jet_order = 0;

    Symbol() = default;
    Symbol(std::string base_name, SymbolKind k, unsigned order = 0);

    /// `base` for order 0, `base_d<order>` otherwise.
    std::string name() const;
    Var var() const;
    /// Same base, order shifted by `by`; kind follows the jet convention.
    Symbol jet(unsigned by) const;

    friend bool operator==(const Symbol& a, const Symbol& b) { return a.name() == b.name(); }
};

/// Builds the canonical jet name for a base identifier.
std::string jet_name(const std::string& base, unsigned order);

class Expr;

enum class Func { Sin, Cos, Tan, Exp, Log, Pow };

const char* to_string(Func f);

struct KernelInfo {
    bool is_symbol = true;
    std::string name;  // symbol name, or printed kernel
    Func func = Func::Sin;
    std::shared_ptr<const Expr> arg;  // set for function kernels
    Rational exponent;                // fractional exponent for Func::Pow, in (0,1)
};

/// Append-only interning table shared by all expressions in the process.
/// Lookups and insertions are thread safe; entries are never mutated.
class KernelTable {
public:
    static KernelTable& instance();

    Var symbol(const std::string& name);
    /// Returns the Var for `func(arg)` (or arg^exponent for Func::Pow).
    Var function(Func func, const Expr& arg, const Rational& exponent = Rational(0));

    const KernelInfo& info(Var v) const;
    bool is_symbol(Var v) const { return info(v).is_symbol; }
    const std::string& name(Var v) const { return info(v).name; }
    std::size_t size() const;

    /// Finds an already interned symbol, or returns false.
    bool lookup(const std::string& name, Var& out) const;

private:
    KernelTable() = default;
    struct Impl;
    Impl& impl() const;
};

inline Var var_of(const std::string& name) { return KernelTable::instance().symbol(name); }
inline const std::string& var_name(Var v) { return KernelTable::instance().name(v); }

}  // namespace sflat
