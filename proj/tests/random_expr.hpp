#pragma once

#include <random>
#include <string>
#include <vector>

#include "sflat/symbolic/expr.hpp"

namespace fixtures {

/// Random expressions over the given symbols, depth bounded.
class ExprGen {
public:
    ExprGen(std::uint64_t seed, std::vector<std::string> symbols, bool transcendental = true)
        : rng_(seed), symbols_(std::move(symbols)), trans_(transcendental) {}

    sflat::Expr operator()(int depth) {
        if (depth <= 0 || pick(4) == 0) return leaf();
        switch (pick(trans_ ? 8 : 5)) {
            case 0: return (*this)(depth - 1) + (*this)(depth - 1);
            case 1: return (*this)(depth - 1) - (*this)(depth - 1);
            case 2: return (*this)(depth - 1) * (*this)(depth - 1);
            case 3: return (*this)(depth - 1).pow(static_cast<long>(pick(3)));
            case 4: {
                // Denominators stay positive to keep samples off poles.
                sflat::Expr d = (*this)(depth - 1);
                return (*this)(depth - 1) / (sflat::Expr(1) + d * d);
            }
            case 5: return sflat::sin((*this)(depth - 1));
            case 6: return sflat::cos((*this)(depth - 1));
            default: return sflat::exp(leaf() / sflat::Expr(4));
        }
    }

    sflat::Expr leaf() {
        if (pick(3) == 0) return sflat::Expr(sflat::Rational(static_cast<long>(pick(9)) - 4, static_cast<long>(pick(3)) + 1));
        return sflat::Expr::symbol(symbols_[pick(symbols_.size())]);
    }

    sflat::Rational rational() {
        sflat::Rational r(static_cast<long>(pick(21)) - 10, static_cast<long>(pick(5)) + 1);
        r.canonicalize();
        return r;
    }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::vector<std::string> symbols_;
    bool trans_;
};

}  // namespace fixtures
