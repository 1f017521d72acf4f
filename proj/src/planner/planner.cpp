#include "sflat/planner/planner.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sflat/numeric/rk4.hpp"

namespace sflat {

namespace {

// k! / (k - l)!
double falling(int k, int l) {
    double r = 1.0;
    for (int i = 0; i < l; ++i) r *= k - i;
    return r;
}

std::string time_str(double t) {
    std::ostringstream os;
    os << std::setprecision(6) << t;
    return os.str();
}

}  // namespace

double ReferenceJet::value(int component, int order, double t) const {
    const auto& a = coeffs[static_cast<std::size_t>(component - 1)];
    const double T = tf - t0;
    if (T == 0.0) return order == 0 && !a.empty() ? a[0] : 0.0;
    const double s = (t - t0) / T;
    double acc = 0.0;
    for (int k = static_cast<int>(a.size()) - 1; k >= order; --k) acc = acc * s + falling(k, order) * a[static_cast<std::size_t>(k)];
    return acc / std::pow(T, order);
}

ReferenceJet reference_jet(const BoundaryJets& b, double t0, double tf, const std::array<int, 3>& R) {
    if (!(tf >= t0)) throw PlannerError("reference: tf must not precede t0");
    ReferenceJet ref;
    ref.t0 = t0;
    ref.tf = tf;
    ref.R = R;
    const double T = tf - t0;
    for (std::size_t c = 0; c < 3; ++c) {
        const int q = R[c];
        for (const auto* side : {&b.start[c], &b.end[c]})
            if (static_cast<int>(side->size()) > q)
                throw PlannerError("reference: y" + std::to_string(c + 1) + " jets beyond order R-1 = " +
                                   std::to_string(q - 1));
        auto jet = [](const std::vector<double>& v, int l) {
            return l < static_cast<int>(v.size()) ? v[static_cast<std::size_t>(l)] : 0.0;
        };
        if (T == 0.0) {
            for (int l = 0; l < q; ++l)
                if (jet(b.start[c], l) != jet(b.end[c], l) || (l > 0 && jet(b.start[c], l) != 0.0))
                    throw PlannerError("reference: empty horizon with conflicting jets for y" + std::to_string(c + 1));
            ref.coeffs[c] = {jet(b.start[c], 0)};
            continue;
        }
        const int N = std::max(2 * q, q + 1);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
        for (int l = 0; l < q; ++l) {
            A(l, l) = falling(l, l);
            rhs[l] = jet(b.start[c], l) * std::pow(T, l);
            for (int k = l; k < N; ++k) A(q + l, k) = falling(k, l);
            rhs[q + l] = jet(b.end[c], l) * std::pow(T, l);
        }
        // Padding rows (only when q == 0 or 1) pin the free top coefficients to zero.
        for (int r = 2 * q; r < N; ++r) A(r, r) = 1.0;
        const Eigen::VectorXd a = A.fullPivLu().solve(rhs);
        ref.coeffs[c].assign(a.data(), a.data() + N);
    }
    return ref;
}

BoundaryJets ramp_rest_to_rest(double a1, double b3, double a3, double tf) {
    BoundaryJets b;
    b.start = {std::vector<double>{0.0}, std::vector<double>{0.0, 1.0}, std::vector<double>{b3}};
    b.end = {std::vector<double>{a1}, std::vector<double>{tf, 1.0}, std::vector<double>{b3 + a3}};
    return b;
}

TimeGrid make_grid(double t0, double tf, double h) {
    if (!(h > 0.0)) throw PlannerError("grid: step must be positive");
    if (!(tf >= t0)) throw PlannerError("grid: tf must not precede t0");
    const double steps = std::round((tf - t0) / h);
    if (std::abs(steps * h - (tf - t0)) > 1e-9 * std::max(1.0, tf - t0))
        throw PlannerError("grid: step " + time_str(h) + " does not divide the horizon");
    return TimeGrid{t0, h, static_cast<std::size_t>(steps)};
}

Point reference_point(const FlatParameterization& F, const ReferenceJet& ref, double t) {
    Point p;
    for (int c = 1; c <= 3; ++c)
        for (int l = 0; l <= F.R[static_cast<std::size_t>(c - 1)]; ++l) p.set(F.jet(c, l).var(), ref.value(c, l, t));
    return p;
}

namespace {

Eigen::VectorXd eval_or_throw(const std::vector<Expr>& es, const std::vector<Symbol>& names, const Point& p,
                              double t) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(es.size()));
    for (std::size_t i = 0; i < es.size(); ++i) {
        auto v = evaluate(es[i], p);
        if (!v) throw PlannerError("feedforward: " + names[i].name() + " undefined at t=" + time_str(t));
        out[static_cast<Eigen::Index>(i)] = *v;
    }
    return out;
}

void check_guards(const FlatParameterization& F, const Point& p, double t) {
    for (const auto& g : F.guards) {
        auto v = evaluate(g, p);
        if (!v || std::abs(*v) <= 1e-9) {
            std::ostringstream os;
            os << "feedforward: guard " << g << " vanishes at t=" << time_str(t);
            throw PlannerError(os.str());
        }
    }
}

}  // namespace

Feedforward feedforward(const FlatParameterization& F, const ReferenceJet& ref, const TimeGrid& grid) {
    Feedforward ff;
    ff.x.reserve(grid.size());
    ff.u.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.at(i);
        const Point p = reference_point(F, ref, t);
        check_guards(F, p, t);
        ff.x.push_back(eval_or_throw(F.F_x, F.states, p, t));
        ff.u.push_back(eval_or_throw(F.F_u, F.inputs, p, t));
    }
    return ff;
}

std::vector<Eigen::VectorXd> integrate(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, const TimeGrid& grid) {
    std::vector<Eigen::VectorXd> xs;
    xs.reserve(grid.size());
    xs.push_back(x0);
    for (std::size_t i = 0; i < grid.steps; ++i) {
        Eigen::VectorXd next = rk4_step(f, grid.at(i), xs.back(), grid.h);
        if (!next.allFinite()) throw PlannerError("integrate: state not finite at t=" + time_str(grid.at(i + 1)));
        xs.push_back(std::move(next));
    }
    return xs;
}

std::vector<Eigen::VectorXd> integrate(const SystemModel& sys, const InputSignal& u, const Eigen::VectorXd& x0,
                                       const TimeGrid& grid) {
    const std::size_t n = sys.n();
    auto rhs = [&](double t, const Eigen::VectorXd& x) {
        const Eigen::VectorXd uu = u(t);
        Point q;
        for (std::size_t k = 0; k < n; ++k) q.set(sys.states[k].var(), x[static_cast<Eigen::Index>(k)]);
        for (std::size_t j = 0; j < sys.m(); ++j) q.set(sys.inputs[j].var(), uu[static_cast<Eigen::Index>(j)]);
        Eigen::VectorXd dx(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) dx[static_cast<Eigen::Index>(k)] = evaluate(sys.dynamics[k], q).value_or(NAN);
        return dx;
    };
    return integrate(std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>(rhs), x0, grid);
}

PlanResult plan_and_validate(const SystemModel& sys, const FlatParameterization& F, const std::vector<Expr>& phi,
                             const ReferenceJet& ref, const TimeGrid& grid) {
    PlanResult r;
    r.ff = feedforward(F, ref, grid);
    auto u = [&](double t) {
        const Point p = reference_point(F, ref, t);
        check_guards(F, p, t);
        return eval_or_throw(F.F_u, F.inputs, p, t);
    };
    r.x_sim = integrate(sys, u, r.ff.x.front(), grid);
    for (const auto& s : sys.states) r.state_names.push_back(s.name());
    for (const auto& s : sys.inputs) r.input_names.push_back(s.name());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid.at(i);
        r.t.push_back(t);
        Point q;
        for (std::size_t k = 0; k < sys.n(); ++k) q.set(sys.states[k].var(), r.x_sim[i][static_cast<Eigen::Index>(k)]);
        std::array<double, 3> y{}, e{};
        for (int c = 1; c <= 3; ++c) {
            const auto j = static_cast<std::size_t>(c - 1);
            y[j] = ref.value(c, 0, t);
            e[j] = std::abs(evaluate(phi[j], q).value_or(NAN) - y[j]);
            if (!(e[j] <= r.sup_error[j])) r.sup_error[j] = std::isnan(e[j]) ? INFINITY : e[j];
        }
        r.y_ref.push_back(y);
        r.error.push_back(e);
    }
    return r;
}

void write_plan_csv(const PlanResult& plan, std::ostream& os) {
    os << "t,y1,y2,y3";
    for (const auto& s : plan.state_names) os << ",ff_" << s;
    for (const auto& s : plan.input_names) os << ",ff_" << s;
    for (const auto& s : plan.state_names) os << ",sim_" << s;
    os << ",e1,e2,e3\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < plan.t.size(); ++i) {
        os << plan.t[i];
        for (double v : plan.y_ref[i]) os << ',' << v;
        for (double v : plan.ff.x[i]) os << ',' << v;
        for (double v : plan.ff.u[i]) os << ',' << v;
        for (double v : plan.x_sim[i]) os << ',' << v;
        for (double v : plan.error[i]) os << ',' << v;
        os << '\n';
    }
}

}  // namespace sflat
