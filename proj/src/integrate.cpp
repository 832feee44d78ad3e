// integrate.cpp — Dormand-Prince integration backends for the rate systems

#include "dicke/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace dicke {

namespace {

using state_type = std::vector<double>;
using error_stepper_type = boost::numeric::odeint::runge_kutta_dopri5<state_type>;
using dense_stepper_type =
    boost::numeric::odeint::result_of::make_dense_output<error_stepper_type>::type;

// Right-hand side dx/dt = G x. Holds a pointer so stepper copies stay cheap.
struct MatrixRhs {
    const Eigen::SparseMatrix<double>* gen;

    void operator()(const state_type& x, state_type& dxdt, double /*t*/) const {
        dxdt.resize(x.size());
        Eigen::Map<const Eigen::VectorXd> xm(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXd> dm(dxdt.data(), static_cast<Eigen::Index>(dxdt.size()));
        dm.noalias() = (*gen) * xm;
    }
};

void ensure_finite(const state_type& x, double t) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw IntegrationError("integration produced a non-finite component near t = " +
                                   std::to_string(t) + " ns");
        }
    }
}

void check_system(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0) {
    if (gen.rows() != gen.cols()) {
        throw std::invalid_argument("integrate: generator must be square");
    }
    if (gen.rows() != x0.size()) {
        throw std::invalid_argument("integrate: initial state has " + std::to_string(x0.size()) +
                                    " entries but the generator is " + std::to_string(gen.rows()) +
                                    "x" + std::to_string(gen.cols()));
    }
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        if (!std::isfinite(x0(i))) {
            throw std::invalid_argument("integrate: initial state contains a non-finite entry");
        }
    }
}

double initial_step(double span, double max_step_ns) {
    double dt = span / 1000.0;
    if (max_step_ns > 0.0) dt = std::min(dt, max_step_ns);
    return dt;
}

} // namespace

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.t_end_ns > 0.0) || !std::isfinite(cfg.t_end_ns)) {
        throw std::invalid_argument("IntegratorConfig: t_end_ns must be positive and finite");
    }
    if (cfg.samples < 2) {
        throw std::invalid_argument("IntegratorConfig: need at least 2 samples");
    }
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) {
        throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    }
    if (cfg.max_step_ns < 0.0 || !std::isfinite(cfg.max_step_ns)) {
        throw std::invalid_argument("IntegratorConfig: max_step_ns must be >= 0 and finite");
    }
}

std::vector<double> uniform_grid(double t_end_ns, int samples) {
    std::vector<double> times(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        times[static_cast<std::size_t>(k)] =
            t_end_ns * (static_cast<double>(k) / static_cast<double>(samples - 1));
    }
    return times;
}

RawTrajectory integrate_matrix(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0,
                               const std::vector<double>& times, double rel_tol, double abs_tol,
                               double max_step_ns) {
    check_system(gen, x0);
    if (times.empty()) {
        throw std::invalid_argument("integrate_matrix: empty time grid");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            throw std::invalid_argument("integrate_matrix: time grid must increase strictly");
        }
    }

    RawTrajectory out;
    out.times.reserve(times.size());
    out.states.reserve(times.size());

    if (times.size() == 1) {
        out.times.push_back(times.front());
        out.states.push_back(x0);
        return out;
    }

    state_type x(x0.data(), x0.data() + x0.size());
    auto stepper = boost::numeric::odeint::make_dense_output(abs_tol, rel_tol, max_step_ns,
                                                             error_stepper_type());
    const double dt0 = initial_step(times.back() - times.front(), max_step_ns);

    const auto observer = [&](const state_type& s, double t) {
        ensure_finite(s, t);
        out.times.push_back(t);
        out.states.emplace_back(
            Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())));
    };

    try {
        boost::numeric::odeint::integrate_times(stepper, MatrixRhs{&gen}, x, times.begin(),
                                                times.end(), dt0, observer);
    } catch (const boost::numeric::odeint::odeint_error& e) {
        throw IntegrationError(std::string("integration stalled (step size collapsed): ") +
                               e.what());
    }
    return out;
}

Trajectory integrate(const RateGenerator& gen, const PopulationState& init,
                     const IntegratorConfig& cfg) {
    validate(cfg);
    const StateSpace& space = gen.space();
    if (init.p.size() != static_cast<Eigen::Index>(space.size())) {
        throw std::invalid_argument("integrate: initial state does not match the state space");
    }

    const std::vector<double> times = uniform_grid(cfg.t_end_ns, cfg.samples);
    RawTrajectory raw = integrate_matrix(gen.matrix(), init.to_raw(), times, cfg.rel_tol,
                                         cfg.abs_tol, cfg.max_step_ns);

    Trajectory traj;
    traj.times = std::move(raw.times);
    traj.states.reserve(raw.states.size());
    for (std::size_t k = 0; k < raw.states.size(); ++k) {
        traj.states.push_back(
            PopulationState::from_raw(space, init.sigma, traj.times[k], raw.states[k]));
    }
    return traj;
}

Eigen::VectorXd fixed_step_solution(const Eigen::SparseMatrix<double>& gen,
                                    const Eigen::VectorXd& x0, double t_end_ns, int steps) {
    check_system(gen, x0);
    if (steps < 1 || !(t_end_ns > 0.0)) {
        throw std::invalid_argument("fixed_step_solution: need steps >= 1 and t_end_ns > 0");
    }

    state_type x(x0.data(), x0.data() + x0.size());
    error_stepper_type stepper;
    const double h = t_end_ns / steps;
    for (int k = 0; k < steps; ++k) {
        stepper.do_step(MatrixRhs{&gen}, x, k * h, h);
    }
    ensure_finite(x, t_end_ns);
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

// --- DensePath ---------------------------------------------------------

struct DensePath::Impl {
    Eigen::SparseMatrix<double> gen;           // owned so segments never dangle
    std::vector<dense_stepper_type> segments;  // segment k covers [previous_time, current_time]
    double t0{0.0};
    double t1{0.0};
};

DensePath::DensePath(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0, double t0,
                     double t1, double rel_tol, double abs_tol, double max_step_ns) {
    check_system(gen, x0);
    if (!(t1 > t0)) {
        throw std::invalid_argument("DensePath: need t1 > t0");
    }

    auto impl = std::make_shared<Impl>();
    impl->gen = gen;
    impl->t0 = t0;
    impl->t1 = t1;

    state_type x(x0.data(), x0.data() + x0.size());
    auto stepper = boost::numeric::odeint::make_dense_output(abs_tol, rel_tol, max_step_ns,
                                                             error_stepper_type());
    stepper.initialize(x, t0, initial_step(t1 - t0, max_step_ns));

    const MatrixRhs rhs{&impl->gen};
    // Generous cap: adaptive steps on these smooth systems number in the
    // hundreds; hitting the cap means the controller is thrashing.
    const std::size_t max_segments = 2'000'000;
    try {
        while (stepper.current_time() < t1) {
            stepper.do_step(rhs);
            ensure_finite(stepper.current_state(), stepper.current_time());
            impl->segments.push_back(stepper);
            if (impl->segments.size() > max_segments) {
                throw IntegrationError("DensePath: step count exploded; system too stiff");
            }
        }
    } catch (const boost::numeric::odeint::odeint_error& e) {
        throw IntegrationError(std::string("DensePath: step size collapsed: ") + e.what());
    }
    impl_ = std::move(impl);
}

double DensePath::t_begin() const { return impl_->t0; }
double DensePath::t_end() const { return impl_->t1; }

Eigen::VectorXd DensePath::state(double t) const {
    if (t < impl_->t0 || t > impl_->t1) {
        throw std::invalid_argument("DensePath::state: t = " + std::to_string(t) +
                                    " outside [" + std::to_string(impl_->t0) + ", " +
                                    std::to_string(impl_->t1) + "]");
    }
    // First segment whose right edge reaches t.
    std::size_t lo = 0;
    std::size_t hi = impl_->segments.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (impl_->segments[mid].current_time() < t) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    state_type x(static_cast<std::size_t>(impl_->gen.rows()), 0.0);
    impl_->segments[lo].calc_state(t, x);
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

double DensePath::value(double t, const Eigen::VectorXd& weights) const {
    const Eigen::VectorXd x = state(t);
    if (weights.size() != x.size()) {
        throw std::invalid_argument("DensePath::value: weight vector size mismatch");
    }
    return weights.dot(x);
}

} // namespace dicke
