#include "sflat/io/system_file.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sflat {

namespace {

struct Line {
    std::size_t number;
    std::string text;  // comment stripped
};

std::size_t first_non_space(const std::string& s, std::size_t from = 0) {
    while (from < s.size() && std::isspace(static_cast<unsigned char>(s[from]))) ++from;
    return from;
}

std::string trim(const std::string& s) {
    const std::size_t a = first_non_space(s);
    std::size_t b = s.size();
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Comma/whitespace separated identifiers with their 1-based columns.
std::vector<std::pair<std::string, std::size_t>> split_names(const Line& l) {
    std::vector<std::pair<std::string, std::size_t>> out;
    std::size_t i = 0;
    const std::string& s = l.text;
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ',') ++j;
        out.emplace_back(s.substr(i, j - i), i + 1);
        i = j;
    }
    return out;
}

class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream is(text);
        std::string raw;
        std::size_t n = 0;
        while (std::getline(is, raw)) {
            ++n;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            const auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            if (trim(raw).empty()) continue;
            lines_.push_back({n, raw});
        }
    }

    SystemFile parse() {
        std::map<std::string, std::vector<Line>> sections;
        std::map<std::string, std::size_t> header_line;
        std::string current;
        for (const auto& l : lines_) {
            const std::string t = trim(l.text);
            if (t.front() == '[') {
                if (t.back() != ']') throw ParseError("unterminated section header", l.number, first_non_space(l.text) + 1);
                current = trim(t.substr(1, t.size() - 2));
                static const std::set<std::string> known{"states", "inputs", "dynamics", "flat_output", "hints"};
                if (!known.count(current))
                    throw ParseError("unknown section [" + current + "]", l.number, first_non_space(l.text) + 1);
                if (header_line.count(current))
                    throw ParseError("duplicate section [" + current + "]", l.number, first_non_space(l.text) + 1);
                header_line[current] = l.number;
                sections[current];
                continue;
            }
            if (current.empty()) throw ParseError("content before the first section", l.number, first_non_space(l.text) + 1);
            sections[current].push_back(l);
        }
        for (const char* req : {"states", "inputs", "dynamics"})
            if (!header_line.count(req)) throw ParseError(std::string("missing section [") + req + "]", lines_.empty() ? 1 : lines_.back().number, 1);

        SystemFile f;
        std::set<std::string> names;
        auto declare = [&](const Line& l, SymbolKind kind, std::vector<Symbol>& into) {
            for (const auto& [name, col] : split_names(l)) {
                if (!is_identifier(name)) throw ParseError("invalid identifier '" + name + "'", l.number, col);
                if (is_reserved_name(name)) throw ParseError("'" + name + "' is a reserved function name", l.number, col);
                if (!names.insert(name).second) throw ParseError("'" + name + "' declared twice", l.number, col);
                into.emplace_back(name, kind);
            }
        };
        for (const auto& l : sections["states"]) declare(l, SymbolKind::State, f.system.states);
        for (const auto& l : sections["inputs"]) declare(l, SymbolKind::Input, f.system.inputs);
        if (f.system.states.empty()) throw ParseError("no states declared", header_line["states"], 1);
        if (f.system.inputs.empty()) throw ParseError("no inputs declared", header_line["inputs"], 1);

        std::map<std::string, std::size_t> state_index;
        for (std::size_t k = 0; k < f.system.states.size(); ++k) state_index[f.system.states[k].name()] = k;
        std::vector<std::optional<Expr>> dyn(f.system.states.size());
        for (const auto& l : sections["dynamics"]) {
            const std::string& s = l.text;
            const std::size_t a = first_non_space(s);
            const auto tick = s.find('\'', a);
            if (tick == std::string::npos) throw ParseError("expected name' = expression", l.number, a + 1);
            const std::string name = trim(s.substr(a, tick - a));
            auto it = state_index.find(name);
            if (it == state_index.end()) throw ParseError("'" + name + "' is not a declared state", l.number, a + 1);
            const std::size_t eq = first_non_space(s, tick + 1);
            if (eq >= s.size() || s[eq] != '=') throw ParseError("expected '=' after " + name + "'", l.number, eq + 1);
            if (dyn[it->second]) throw ParseError("second dynamics line for " + name, l.number, a + 1);
            dyn[it->second] = parse_expr(s.substr(eq + 1), names, l.number, eq + 1);
        }
        for (std::size_t k = 0; k < dyn.size(); ++k) {
            if (!dyn[k])
                throw ParseError("no dynamics line for state " + f.system.states[k].name(), header_line["dynamics"], 1);
            f.system.dynamics.push_back(*dyn[k]);
        }

        for (const auto& l : sections["flat_output"]) {
            const std::size_t a = first_non_space(l.text);
            Expr e = parse_expr(l.text.substr(a), names, l.number, a);
            for (const auto& u : f.system.inputs)
                if (e.depends_on(u.var()))
                    throw ParseError("flat output may depend on states only (found " + u.name() + ")", l.number, a + 1);
            f.flat_output.push_back(std::move(e));
        }

        // Hints may also name input jets (u1_d1, ...) used after prolongation.
        std::set<std::string> hint_names = names;
        for (const auto& u : f.system.inputs)
            for (unsigned d = 1; d <= 16; ++d) hint_names.insert(jet_name(u.name(), d));
        for (const auto& l : sections["hints"]) {
            const std::size_t a = first_non_space(l.text);
            const auto eq = l.text.find('=', a);
            if (eq == std::string::npos) throw ParseError("expected name = value", l.number, a + 1);
            const std::string key = trim(l.text.substr(a, eq - a));
            if (!is_identifier(key)) throw ParseError("invalid hint name '" + key + "'", l.number, a + 1);
            const std::string rhs = l.text.substr(eq + 1);
            if (key == "point") {
                parse_point(l, eq + 1, names, f.hints);
                continue;
            }
            Expr v = parse_expr(rhs, hint_names, l.number, eq + 1);
            if (key == "phi_u2") {
                if (f.hints.phi_u2) throw ParseError("phi_u2 given twice", l.number, a + 1);
                f.hints.phi_u2 = v;
            } else {
                for (const auto& h : f.hints.coordinates)
                    if (h.name == key) throw ParseError("hint '" + key + "' given twice", l.number, a + 1);
                f.hints.coordinates.push_back({key, v});
            }
        }

        f.system.affine = affine_decomposition(f.system);
        try {
            f.system.validate();
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), header_line["states"], 1);
        }
        return f;
    }

private:
    static void parse_point(const Line& l, std::size_t from, const std::set<std::string>& names, SystemHints& h) {
        const std::string& s = l.text;
        std::size_t i = from;
        while (i < s.size()) {
            i = first_non_space(s, i);
            if (i >= s.size()) break;
            std::size_t end = s.find(',', i);
            if (end == std::string::npos) end = s.size();
            const std::string item = s.substr(i, end - i);
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw ParseError("expected name:value", l.number, i + 1);
            const std::string name = trim(item.substr(0, colon));
            if (!names.count(name)) throw ParseError("'" + name + "' is not a declared state or input", l.number, i + 1);
            const Expr v = parse_expr(item.substr(colon + 1), {}, l.number, i + colon + 1);
            if (!v.is_constant() || v.has_kernels())
                throw ParseError("point value for " + name + " must be a number", l.number, i + colon + 2);
            for (const auto& [n, _] : h.point)
                if (n == name) throw ParseError("'" + name + "' appears twice in point", l.number, i + 1);
            h.point.emplace_back(name, v.constant_value());
            i = end + 1;
        }
        if (h.point.empty()) throw ParseError("empty point", l.number, from + 1);
    }

    std::vector<Line> lines_;
};

}  // namespace

SystemFile parse_system(const std::string& text) { return Reader(text).parse(); }

SystemFile load_system(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path, 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str());
}

std::string print_system(const SystemFile& f) {
    std::ostringstream os;
    auto list = [&](const std::vector<Symbol>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i].name();
        os << "\n";
    };
    os << "[states]\n";
    list(f.system.states);
    os << "\n[inputs]\n";
    list(f.system.inputs);
    os << "\n[dynamics]\n";
    for (std::size_t k = 0; k < f.system.n(); ++k) os << f.system.states[k].name() << "' = " << f.system.dynamics[k] << "\n";
    os << "\n[flat_output]\n";
    for (const auto& e : f.flat_output) os << e << "\n";
    os << "\n[hints]\n";
    for (const auto& h : f.hints.coordinates) os << h.name << " = " << h.value << "\n";
    if (f.hints.phi_u2) os << "phi_u2 = " << *f.hints.phi_u2 << "\n";
    if (!f.hints.point.empty()) {
        os << "point = ";
        for (std::size_t i = 0; i < f.hints.point.size(); ++i)
            os << (i ? ", " : "") << f.hints.point[i].first << ":" << f.hints.point[i].second.get_str();
        os << "\n";
    }
    return os.str();
}

std::optional<Point> hint_point(const SystemHints& h) {
    if (h.point.empty()) return std::nullopt;
    Point p;
    for (const auto& [name, v] : h.point) p.set_exact(var_of(name), v);
    return p;
}

}  // namespace sflat
