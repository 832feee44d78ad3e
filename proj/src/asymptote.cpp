// asymptote.cpp — Spectral and long-horizon late-time limits

#include "dicke/asymptote.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "dicke/format.hpp"
#include "dicke/integrate.hpp"

namespace dicke {

namespace {

double inf_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// A computed eigenvalue above the floor may be genuine growth or noise
// scattered off an ill-conditioned zero cluster (observed as far out as
// 5e-5 relative on term-ablated generators, overlapping the band of real
// decay rates — no static threshold separates the two). Decide dynamically:
// square the propagator out to 512 claimed e-folding times. A genuine mode
// at `rate` then amplifies by e^512 ~ 1e222, and the spectral radius
// bounds the norm from below, so the norm blows far past 1e100; a stable
// system plateaus at the norm of its kernel projector, observed up to
// ~2e13 on the worst term-ablated generator and structurally nowhere near
// that line.
bool instability_confirmed(const Eigen::MatrixXd& gen, double rate) {
    Eigen::MatrixXd p = (gen * (1.0 / rate)).exp();
    for (int k = 0; k < 9; ++k) {
        const double norm = inf_norm(p);
        if (!(norm <= 1e100)) return true;  // explosion, overflow, or NaN
        p = p * p;
    }
    return !(inf_norm(p) <= 1e100);
}

// Orthonormal basis of the column span of m (thin Q of a QR factorization).
Eigen::MatrixXd orthonormalized(const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

// One certificate leg [t, t + span] by the implicit trapezoid rule with a
// fixed step count. A-stable, so the step is not pinned to ~1/||G|| the way
// an explicit stepper is; past the initial transient the state barely moves
// and a whole leg costs one factorization plus `steps` solves.
Eigen::VectorXd trapezoid_leg(const Eigen::MatrixXd& gen, const Eigen::VectorXd& x0, double span,
                              int steps) {
    const double dt = span / steps;
    const Eigen::Index n = gen.rows();
    const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n) - (0.5 * dt) * gen;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
    Eigen::VectorXd x = x0;
    for (int k = 0; k < steps; ++k) {
        x = lu.solve(x + (0.5 * dt) * (gen * x));
    }
    return x;
}

// Advance x across one certificate leg of length `span` (the system is
// autonomous, so only the length matters). Returns false when the leg
// cannot be resolved within the step budget; otherwise *achieved reports
// the rounding level the leg reached in the functional (0 when negligible).
//
// Affordable legs run on the adaptive explicit stepper, whose rounding
// stays at the matvec level. When span * ||G|| outgrows its
// stability-bounded step budget, the leg falls back to the trapezoid rule
// with step-halving control. The fallback's linear solves amplify rounding
// on badly conditioned generators — (I - dt/2 G) can be nearly singular in
// the non-normal sense even though its eigenvalues are benign — so the
// halving ladder watches for the measured error to stop contracting and
// accepts that plateau as the accuracy the leg can achieve, reporting it
// through *achieved rather than looping forever. A state that overflows to
// non-finite values is returned as-is for the caller's divergence check.
bool settle_leg(const Eigen::SparseMatrix<double>& sparse, const Eigen::MatrixXd& dense,
                double gen_norm, Eigen::VectorXd& x, double span, const Eigen::VectorXd& weights,
                double f_target, double state_target, double rel_tol, double abs_tol,
                int* steps_hint, double* achieved) {
    *achieved = 0.0;
    const double explicit_steps = span * gen_norm / 3.0;  // stability-bounded step estimate
    if (explicit_steps <= 4e6) {
        const std::vector<double> times{0.0, span};
        x = integrate_matrix(sparse, x, times, rel_tol, abs_tol, 0.0).states[1];
        return true;
    }

    int steps = std::max(64, *steps_hint);
    Eigen::VectorXd coarse = trapezoid_leg(dense, x, span, steps);
    double prev_f_diff = std::numeric_limits<double>::infinity();
    int stagnant = 0;
    while (steps <= (1 << 20)) {
        const Eigen::VectorXd fine = trapezoid_leg(dense, x, span, 2 * steps);
        if (!coarse.allFinite() || !fine.allFinite()) {
            x = fine;
            return true;
        }
        const double f_diff = std::abs(weights.dot(fine) - weights.dot(coarse));
        const double x_diff = (fine - coarse).lpNorm<Eigen::Infinity>();
        if (f_diff <= f_target && x_diff <= state_target) {
            x = fine;
            *steps_hint = std::max(64, steps / 2);
            *achieved = f_diff;
            return true;
        }
        // Genuine second-order error contracts 4x per halving; a rounding
        // plateau does not contract at all. Two non-contracting halvings in
        // a row past a minimum effort mean the plateau has been hit.
        stagnant = f_diff > 0.5 * prev_f_diff ? stagnant + 1 : 0;
        if (stagnant >= 2 && steps >= 4096) {
            x = fine;
            *steps_hint = std::max(64, steps / 2);
            *achieved = std::max(f_diff, prev_f_diff);
            return true;
        }
        prev_f_diff = f_diff;
        steps *= 2;
        coarse = fine;
    }
    return false;
}

// Projection of x0 onto the kernel of G along the range of G. For a stable
// system with a semisimple zero eigenvalue the state space splits as
// ker(G) + range(G); every component in the range decays and the kernel
// component is the late-time limit. Returns false when no such projection
// exists (defective zero eigenvalue) or when it is too oblique to evaluate
// within agreement_tol, signalling the caller to rely on the integration
// route alone.
bool spectral_limit(const Eigen::MatrixXd& gen, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd& weights, const AsymptoteOptions& opts,
                    double gen_norm, double* out) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu_right(gen);
    lu_right.setThreshold(opts.singular_rel_tol);
    const Eigen::Index dim_kernel = lu_right.dimensionOfKernel();
    if (dim_kernel == 0) {
        // Trivial kernel: nothing is stationary, so if a limit exists at all
        // (the horizon certificate decides that) it is exactly zero.
        *out = 0.0;
        return true;
    }

    // Row rank equals column rank, so a mismatch here can only be a
    // thresholding artifact; distrust the projection in that case.
    Eigen::FullPivLU<Eigen::MatrixXd> lu_left(gen.transpose());
    lu_left.setThreshold(opts.singular_rel_tol);
    if (lu_left.dimensionOfKernel() != dim_kernel) return false;

    // Oblique projection: x_inf = K c with (L^T K) c = L^T x0, where the
    // columns of K span ker(G) and the columns of L span ker(G^T), the
    // orthogonal complement of range(G). With both bases orthonormal the
    // singular values of L^T K are the cosines of the principal angles
    // between the two subspaces: a zero cosine means kernel and range
    // overlap (defective zero eigenvalue, no projection), and a tiny one
    // means the projection exists but amplifies rounding by its inverse.
    const Eigen::MatrixXd kernel = orthonormalized(lu_right.kernel());
    const Eigen::MatrixXd left_kernel = orthonormalized(lu_left.kernel());
    const Eigen::MatrixXd overlap = left_kernel.transpose() * kernel;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (!(svd.singularValues().minCoeff() >= opts.kernel_overlap_floor)) return false;

    const Eigen::VectorXd rhs = left_kernel.transpose() * x0;
    const Eigen::VectorXd coeff = svd.solve(rhs);
    const double solve_residual = (overlap * coeff - rhs).lpNorm<Eigen::Infinity>();
    if (!(solve_residual <= 1e-10 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))) return false;

    const Eigen::VectorXd limit = kernel * coeff;
    // A true stationary state is annihilated by the generator.
    const double stationarity = (gen * limit).lpNorm<Eigen::Infinity>();
    const double stat_tol =
        1e-8 * std::max(1.0, gen_norm) * std::max(1.0, limit.lpNorm<Eigen::Infinity>());
    if (!(stationarity <= stat_tol)) return false;

    *out = weights.dot(limit);
    return std::isfinite(*out);
}

} // namespace

AsymptoteResult asymptote_of(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& weights, const AsymptoteOptions& opts) {
    if (gen.rows() != gen.cols() || gen.rows() != x0.size() || weights.size() != x0.size()) {
        throw std::invalid_argument("asymptote_of: dimension mismatch");
    }
    if (!x0.allFinite() || !weights.allFinite()) {
        throw std::invalid_argument("asymptote_of: non-finite initial state or weights");
    }

    const Eigen::MatrixXd dense = Eigen::MatrixXd(gen);
    if (!dense.allFinite()) {
        throw std::invalid_argument("asymptote_of: non-finite generator");
    }
    const double gen_norm = inf_norm(dense);
    // Classification floor: computed eigenvalues of the exact-zero cluster
    // land well below it, genuine decay rates well above (see header).
    const double rate_floor = opts.rate_floor_rel * gen_norm;

    Eigen::EigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) {
        throw AsymptoteError("asymptote_of: eigenvalue iteration failed to converge");
    }

    AsymptoteResult res;
    double slowest = std::numeric_limits<double>::infinity();
    double max_re = -std::numeric_limits<double>::infinity();
    double oscillation_hz = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const std::complex<double> lambda = es.eigenvalues()(k);
        max_re = std::max(max_re, lambda.real());
        if (std::abs(lambda.real()) > rate_floor) {
            // Counting a noise eigenvalue here only pads the integration
            // horizon; the drift certificate remains the arbiter.
            slowest = std::min(slowest, std::abs(lambda.real()));
        } else if (std::abs(lambda.imag()) > rate_floor) {
            // Undamped oscillation candidate; only acted on if the horizon
            // certificate later fails to settle.
            oscillation_hz = std::max(oscillation_hz, std::abs(lambda.imag()));
        }
    }
    if (max_re > rate_floor && instability_confirmed(dense, max_re)) {
        throw UnstableSystemError(
            "asymptote_of: eigenvalue with positive real part " + format_double(max_re) +
            " 1/ns — the system diverges");
    }
    res.slowest_rate = std::isfinite(slowest) ? slowest : 0.0;

    res.spectral_available =
        spectral_limit(dense, x0, weights, opts, gen_norm, &res.spectral_value);

    // Long-horizon route: advance one trajectory far past the slowest decay
    // and check that the functional has stopped moving between T and 2T. A
    // decay mode the eigensolver buried inside the zero cluster only makes
    // the first horizon too short; the ladder keeps doubling T (reusing the
    // state already reached) until the certificate passes or the attempt
    // budget runs out. The certificate, not the initial guess, decides. The
    // leg up to the first horizon crosses the fast transient, where the
    // adaptive explicit stepper is the right tool; every doubling leg after
    // it runs in the settled regime and uses the implicit rule above.
    double horizon = opts.horizon_floor_ns;
    if (res.slowest_rate > 0.0) {
        horizon = std::max(horizon, opts.horizon_rate_factor / res.slowest_rate);
    }
    const std::vector<double> head_times{0.0, horizon};
    const RawTrajectory head =
        integrate_matrix(gen, x0, head_times, opts.rel_tol, opts.abs_tol, 0.0);
    Eigen::VectorXd state = head.states[1];
    double f_prev = weights.dot(state);

    const double f_target = 0.02 * opts.certificate_tol;
    const double state_target =
        std::max(opts.abs_tol, f_target / std::max(1.0, weights.cwiseAbs().sum()));
    int steps_hint = 64;
    double noise_level = 0.0;  // accumulated fallback rounding across legs
    double drift = std::numeric_limits<double>::infinity();
    double t_checked = horizon;
    bool certified = false;
    for (int attempt = 0; attempt < opts.max_horizon_doublings && !certified; ++attempt) {
        t_checked = horizon;
        double leg_noise = 0.0;
        if (!settle_leg(gen, dense, gen_norm, state, horizon, weights, f_target, state_target,
                        opts.rel_tol, opts.abs_tol, &steps_hint, &leg_noise)) {
            break;  // leg unresolvable within the step budget
        }
        noise_level += leg_noise;
        if (!state.allFinite()) {
            throw UnstableSystemError(
                "asymptote_of: state overflowed while integrating toward T = " +
                format_double(2.0 * horizon) + " ns — growth below the eigenvalue floor");
        }
        const double f_curr = weights.dot(state);
        drift = std::abs(f_curr - f_prev);
        // The certificate never tightens past what the arithmetic of the
        // fallback legs could express; the bound actually applied is
        // reported so a widened certificate is visible, not silent.
        const double tol_eff = std::max(opts.certificate_tol, 8.0 * noise_level);
        if (drift < tol_eff) {
            res.horizon_ns = horizon;
            res.horizon_value = f_curr;
            res.certificate_tol_used = tol_eff;
            certified = true;
        } else {
            f_prev = f_curr;
            horizon *= 2.0;
        }
    }
    if (!certified) {
        if (oscillation_hz > 0.0) {
            throw OscillatorySystemError(
                "asymptote_of: undamped oscillation at frequency " + format_double(oscillation_hz) +
                " 1/ns keeps |F(2T)-F(T)| = " + format_double(drift) + " from settling at T = " +
                format_double(t_checked) + " ns");
        }
        throw AsymptoteError("asymptote_of: horizon value still drifting, |F(2T)-F(T)| = " +
                             format_double(drift) + " at T = " + format_double(t_checked) +
                             " ns");
    }

    if (res.spectral_available &&
        !(std::abs(res.spectral_value - res.horizon_value) <= opts.agreement_tol)) {
        throw AsymptoteMismatchError(
            "asymptote_of: spectral route gives " + format_double(res.spectral_value) +
            " but the integration route gives " + format_double(res.horizon_value));
    }
    res.value = res.spectral_available ? res.spectral_value : res.horizon_value;
    return res;
}

AsymptoteResult asymptote(const RateGenerator& gen, const PopulationState& init,
                          const AsymptoteOptions& opts) {
    const Eigen::VectorXd weights =
        fluorescence_weights(gen.space(), gen.params(), gen.flags());
    return asymptote_of(gen.matrix(), init.to_raw(), weights, opts);
}

} // namespace dicke
