#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "sflat/geometry/exterior.hpp"

namespace fixtures {

/// Largest |coefficient| of dw^a ^ w^1 ^ ... ^ w^k over every index set of
/// size k + 2, evaluated at p by brute force.
inline double max_wedge_coefficient(const sflat::Codistribution& d, const sflat::Point& p) {
    using namespace sflat;
    const auto& space = *d.space();
    const std::size_t k = d.rank();
    std::set<std::size_t> cols;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t j = 0; j < space.dim(); ++j) {
            const Expr& e = d.basis()(a, j);
            if (e.is_zero()) continue;
            cols.insert(j);
            for (Var s : e.free_symbols())
                if (space.index_of(s) >= 0) cols.insert(static_cast<std::size_t>(space.index_of(s)));
        }
    std::vector<std::size_t> idx(cols.begin(), cols.end());
    const std::size_t c = idx.size();
    if (c < k + 2) return 0.0;
    Eigen::MatrixXd w(k, c);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t j = 0; j < c; ++j) w(a, j) = *evaluate(d.basis()(a, idx[j]), p);
    double best = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        TwoForm dw = exterior_derivative(d.form(a), space);
        Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(c, c);
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                Expr e = dw.at(idx[i], idx[j]);
                if (!e.is_zero()) cm(i, j) = *evaluate(e, p);
            }
        // Enumerate (k+2)-subsets via a selection mask.
        std::vector<bool> mask(c, false);
        std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k + 2), true);
        do {
            std::vector<std::size_t> sel;
            for (std::size_t i = 0; i < c; ++i)
                if (mask[i]) sel.push_back(i);
            double coef = 0.0;
            // Split into an ordered pair J and its complement L; sign from the shuffle.
            for (std::size_t x = 0; x < sel.size(); ++x)
                for (std::size_t y = x + 1; y < sel.size(); ++y) {
                    std::vector<std::size_t> rest;
                    for (std::size_t z = 0; z < sel.size(); ++z)
                        if (z != x && z != y) rest.push_back(sel[z]);
                    double det = 1.0;
                    if (k > 0) {
                        Eigen::MatrixXd sub(k, k);
                        for (std::size_t a2 = 0; a2 < k; ++a2)
                            for (std::size_t z = 0; z < k; ++z) sub(a2, z) = w(a2, rest[z]);
                        det = sub.determinant();
                    }
                    const int sign = ((x + y - 1) % 2 == 0) ? 1 : -1;
                    coef += sign * cm(sel[x], sel[y]) * det;
                }
            best = std::max(best, std::fabs(coef));
        } while (std::prev_permutation(mask.begin(), mask.end()));
    }
    return best;
}

}  // namespace fixtures
