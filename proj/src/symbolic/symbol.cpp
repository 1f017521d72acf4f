#include "sflat/symbolic/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "sflat/symbolic/expr.hpp"

namespace sflat {

const char* to_string(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::State: return "state";
        case SymbolKind::Input: return "input";
        case SymbolKind::InputJet: return "input-jet";
        case SymbolKind::FlatJet: return "flat-jet";
        case SymbolKind::Parameter: return "parameter";
    }
    return "?";
}

const char* to_string(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Tan: return "tan";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Pow: return "pow";
    }
    return "?";
}

std::string jet_name(const std::string& base, unsigned order) {
    if (order == 0) return base;
    return base + "_d" + std::to_string(order);
}

Symbol::Symbol(std::string base_name, SymbolKind k, unsigned order)
    : base(std::move(base_name)), kind(k), jet_order(order) {}

std::string Symbol::name() const { return jet_name(base, jet_order); }

Var Symbol::var() const { return KernelTable::instance().symbol(name()); }

Symbol Symbol::jet(unsigned by) const {
    Symbol s = *this;
    s.jet_order += by;
    if (by > 0 && s.kind == SymbolKind::Input) s.kind = SymbolKind::InputJet;
    return s;
}

struct KernelTable::Impl {
    mutable std::shared_mutex mutex;
    std::deque<KernelInfo> entries;
    std::unordered_map<std::string, Var> by_key;
};

KernelTable& KernelTable::instance() {
    static KernelTable table;
    return table;
}

KernelTable::Impl& KernelTable::impl() const {
    static Impl data;
    return data;
}

Var KernelTable::symbol(const std::string& name) {
    auto& d = impl();
    {
        std::shared_lock lock(d.mutex);
        auto it = d.by_key.find(name);
        if (it != d.by_key.end()) return it->second;
    }
    std::unique_lock lock(d.mutex);
    auto it = d.by_key.find(name);
    if (it != d.by_key.end()) return it->second;
    KernelInfo info;
    info.is_symbol = true;
    info.name = name;
    d.entries.push_back(std::move(info));
    auto v = static_cast<Var>(d.entries.size() - 1);
    d.by_key.emplace(name, v);
    return v;
}

Var KernelTable::function(Func func, const Expr& arg, const Rational& exponent) {
    std::string printed;
    if (func == Func::Pow) {
        printed = "(" + arg.to_string() + ")^(" + exponent.get_str() + ")";
        if (exponent == Rational(1, 2)) printed = "sqrt(" + arg.to_string() + ")";
    } else {
        printed = std::string(to_string(func)) + "(" + arg.to_string() + ")";
    }
    const std::string key = "\x01" + printed;
    auto& d = impl();
    {
        std::shared_lock lock(d.mutex);
        auto it = d.by_key.find(key);
        if (it != d.by_key.end()) return it->second;
    }
    std::unique_lock lock(d.mutex);
    auto it = d.by_key.find(key);
    if (it != d.by_key.end()) return it->second;
    KernelInfo info;
    info.is_symbol = false;
    info.name = printed;
    info.func = func;
    info.arg = std::make_shared<const Expr>(arg);
    info.exponent = exponent;
    d.entries.push_back(std::move(info));
    auto v = static_cast<Var>(d.entries.size() - 1);
    d.by_key.emplace(key, v);
    return v;
}

const KernelInfo& KernelTable::info(Var v) const {
    auto& d = impl();
    std::shared_lock lock(d.mutex);
    if (v >= d.entries.size()) throw std::out_of_range("unknown variable id");
    return d.entries[v];
}

std::size_t KernelTable::size() const {
    auto& d = impl();
    std::shared_lock lock(d.mutex);
    return d.entries.size();
}

bool KernelTable::lookup(const std::string& name, Var& out) const {
    auto& d = impl();
    std::shared_lock lock(d.mutex);
    auto it = d.by_key.find(name);
    if (it == d.by_key.end()) return false;
    out = it->second;
    return true;
}

}  // namespace sflat
