// integrate.hpp — Adaptive integration of the linear rate systems

#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/generator.hpp"
#include "dicke/state_space.hpp"

namespace dicke {

// Raised when the stepper cannot make progress (stiffness collapse of the
// step size) or a state component turns non-finite.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
    double t_end_ns{100.0};
    int samples{2000};       // uniform grid including both end points
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    double max_step_ns{0.0}; // 0 means the controller alone picks the step
};

void validate(const IntegratorConfig& cfg);

// Grid 0, t_end/(samples-1), ..., t_end with the end points hit exactly.
std::vector<double> uniform_grid(double t_end_ns, int samples);

// Solution of d/dt x = G x sampled on an arbitrary strictly increasing grid;
// x0 is the state at times.front().
struct RawTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
};

RawTrajectory integrate_matrix(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0,
                               const std::vector<double>& times, double rel_tol = 1e-9,
                               double abs_tol = 1e-12, double max_step_ns = 0.0);

// Population trajectory of one manifold on the uniform grid of `cfg`. The
// initial state is taken as the state at t = 0.
struct Trajectory {
    std::vector<double> times;
    std::vector<PopulationState> states;
};

Trajectory integrate(const RateGenerator& gen, const PopulationState& init,
                     const IntegratorConfig& cfg);

// End state of a fixed-step Dormand-Prince run with `steps` equal steps.
// Exists for convergence-order validation; production paths use the
// adaptive controller above.
Eigen::VectorXd fixed_step_solution(const Eigen::SparseMatrix<double>& gen,
                                    const Eigen::VectorXd& x0, double t_end_ns, int steps);

// Continuously evaluable solution over one window [t0, t1], built from the
// dense interpolants of every accepted step. Sampling it does not
// re-integrate, so nearby evaluations are consistent to interpolation
// accuracy — which is what bisection on a functional of the solution needs.
class DensePath {
public:
    DensePath(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0, double t0,
              double t1, double rel_tol = 1e-9, double abs_tol = 1e-12,
              double max_step_ns = 0.0);

    double t_begin() const;
    double t_end() const;

    Eigen::VectorXd state(double t) const;                        // t in [t0, t1]
    double value(double t, const Eigen::VectorXd& weights) const; // weights . state(t)

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

} // namespace dicke
