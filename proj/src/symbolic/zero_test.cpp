#include "sflat/symbolic/zero_test.hpp"

#include <cmath>
#include <sstream>

namespace sflat {

TriState combine_all(const TriState& a, const TriState& b) {
    if (a.is_no()) return a;
    if (b.is_no()) return b;
    if (a.is_inconclusive()) return a;
    if (b.is_inconclusive()) return b;
    return a;
}

Sampler::Sampler(const SampleOptions& opts) : opts_(opts), rng_(opts.seed) {}

Rational Sampler::draw_value(bool positive) {
    std::uniform_int_distribution<int> num(positive ? 1 : -opts_.bound, opts_.bound);
    std::uniform_int_distribution<int> den(1, opts_.bound);
    Rational r(num(rng_), den(rng_));
    r.canonicalize();
    return r;
}

Point Sampler::draw(const std::set<Var>& vars, bool positive) {
    Point p;
    for (Var v : vars) {
        if (opts_.fixed && opts_.fixed->has(v)) {
            if (const Rational* r = opts_.fixed->exact(v))
                p.set_exact(v, *r);
            else
                p.set(v, opts_.fixed->get(v));
            continue;
        }
        p.set_exact(v, draw_value(positive));
    }
    return p;
}

namespace {

bool positive_needed(const Expr& e, std::set<Var>& seen) {
    for (Var a : e.atoms()) {
        const KernelInfo& k = KernelTable::instance().info(a);
        if (k.is_symbol || !seen.insert(a).second) continue;
        if (k.func == Func::Log || k.func == Func::Pow) return true;
        if (positive_needed(*k.arg, seen)) return true;
    }
    return false;
}

}  // namespace

bool needs_positive_samples(const Expr& e) {
    std::set<Var> seen;
    return positive_needed(e, seen);
}

TriState is_identically_zero(const Expr& e, const SampleOptions& opts) {
    if (e.is_zero()) return TriState::yes("canonical form is 0");
    if (e.is_constant()) {
        return TriState::no("nonzero constant " + e.constant_value().get_str());
    }
    const std::set<Var> vars = e.free_symbols();
    const bool exact = !e.has_kernels();
    const bool positive = needs_positive_samples(e);
    Sampler sampler(opts);
    int poles = 0;
    for (int i = 0; i < opts.samples; ++i) {
        Point p = sampler.draw(vars, positive);
        if (exact) {
            auto v = evaluate_exact(e, p);
            if (v) {
                if (*v != 0) return TriState::no("nonzero value " + v->get_str(), p.describe());
                continue;
            }
            // Pinned coordinates may be inexact; fall through to doubles.
        }
        auto v = evaluate(e, p);
        if (!v) {
            ++poles;
            continue;
        }
        if (std::fabs(*v) > kZeroTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "nonzero value " << *v;
            return TriState::no(os.str(), p.describe());
        }
    }
    if (poles == opts.samples) return TriState::inconclusive("all sample points are poles or outside the domain");
    return TriState::inconclusive("vanishes at all " + std::to_string(opts.samples - poles) +
                                  " sample points but does not simplify to 0");
}

}  // namespace sflat
