#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sflat/geometry/system_model.hpp"
#include "sflat/triangular/triangular.hpp"

namespace sflat {

class PlannerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Jets y^j_[0..] of each flat-output component at one end of the horizon.
struct BoundaryJets {
    std::array<std::vector<double>, 3> start;
    std::array<std::vector<double>, 3> end;
};

/// Polynomial reference y^j(t), stored in the normalized time s = (t - t0) / (tf - t0).
struct ReferenceJet {
    double t0 = 0.0, tf = 1.0;
    std::array<std::vector<double>, 3> coeffs;
    std::array<int, 3> R{};

    /// d^l/dt^l y^j at t (component 1..3).
    double value(int component, int order, double t) const;
    int degree(int component) const { return static_cast<int>(coeffs[static_cast<std::size_t>(component - 1)].size()) - 1; }
};

/// Minimal-degree polynomials matching the boundary jets (orders up to R^j - 1,
/// missing orders are zero).
ReferenceJet reference_jet(const BoundaryJets& b, double t0, double tf, const std::array<int, 3>& R);

/// y^1: 0 -> a1 and y^3: b3 -> b3 + a3 at rest, y^2 a unit-speed ramp. The
/// ramp keeps the lifted academic example away from its u^1 = 0 singularity.
BoundaryJets ramp_rest_to_rest(double a1, double b3, double a3, double tf = 1.0);

struct TimeGrid {
    double t0 = 0.0;
    double h = 1e-3;
    std::size_t steps = 0;
    double at(std::size_t i) const { return t0 + h * static_cast<double>(i); }
    std::size_t size() const { return steps + 1; }
};

TimeGrid make_grid(double t0, double tf, double h);

/// Flat jets of the reference at time t as a symbol point.
Point reference_point(const FlatParameterization& F, const ReferenceJet& ref, double t);

struct Feedforward {
    std::vector<Eigen::VectorXd> x;
    std::vector<Eigen::VectorXd> u;
};

/// Evaluates F_x and F_u on the grid; throws on the first time a guard is
/// within 1e-9 of zero or an entry is not finite.
Feedforward feedforward(const FlatParameterization& F, const ReferenceJet& ref, const TimeGrid& grid);

using InputSignal = std::function<Eigen::VectorXd(double)>;

/// Fixed-step RK4; throws with the time stamp when the state stops being finite.
std::vector<Eigen::VectorXd> integrate(const SystemModel& sys, const InputSignal& u, const Eigen::VectorXd& x0,
                                       const TimeGrid& grid);

/// Same integrator for a plain right-hand side (used for the order checks).
std::vector<Eigen::VectorXd> integrate(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& f,
                                       const Eigen::VectorXd& x0, const TimeGrid& grid);

struct PlanResult {
    std::vector<double> t;
    std::vector<std::array<double, 3>> y_ref;
    Feedforward ff;
    std::vector<Eigen::VectorXd> x_sim;
    std::vector<std::array<double, 3>> error;
    std::array<double, 3> sup_error{};
    std::vector<std::string> state_names, input_names;
};

PlanResult plan_and_validate(const SystemModel& sys, const FlatParameterization& F, const std::vector<Expr>& phi,
                             const ReferenceJet& ref, const TimeGrid& grid);

/// Columns t, y1..y3, ff_<x>, ff_<u>, sim_<x>, e1..e3.
void write_plan_csv(const PlanResult& plan, std::ostream& os);

}  // namespace sflat
