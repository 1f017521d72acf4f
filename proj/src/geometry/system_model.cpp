#include "sflat/geometry/system_model.hpp"

#include <set>
#include <stdexcept>

namespace sflat {

std::vector<Var> SystemModel::state_vars() const {
    std::vector<Var> out;
    for (const auto& s : states) out.push_back(s.var());
    return out;
}

std::vector<Var> SystemModel::input_vars() const {
    std::vector<Var> out;
    for (const auto& s : inputs) out.push_back(s.var());
    return out;
}

void SystemModel::validate() const {
    if (dynamics.size() != states.size())
        throw std::invalid_argument("expected " + std::to_string(states.size()) + " dynamics entries, got " +
                                    std::to_string(dynamics.size()));
    std::set<std::string> names;
    for (const auto& s : states)
        if (!names.insert(s.name()).second) throw std::invalid_argument("duplicate symbol " + s.name());
    for (const auto& s : inputs)
        if (!names.insert(s.name()).second) throw std::invalid_argument("duplicate symbol " + s.name());
}

std::optional<AffineDecomposition> affine_decomposition(const SystemModel& sys) {
    const auto uv = sys.input_vars();
    Bindings zero;
    for (Var u : uv) zero[u] = Expr(0);
    AffineDecomposition out;
    out.columns.assign(uv.size(), std::vector<Expr>(sys.n(), Expr(0)));
    for (std::size_t i = 0; i < sys.n(); ++i) {
        const Expr& fi = sys.dynamics[i];
        for (std::size_t j = 0; j < uv.size(); ++j) {
            Expr g = differentiate(fi, uv[j]);
            for (Var u : uv)
                if (g.depends_on(u)) return std::nullopt;
            out.columns[j][i] = g;
        }
        out.drift.push_back(substitute(fi, zero));
    }
    return out;
}

}  // namespace sflat
