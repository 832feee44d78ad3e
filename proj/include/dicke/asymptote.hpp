// asymptote.hpp — Late-time limits of the rate systems by two independent routes

#pragma once

#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/generator.hpp"
#include "dicke/state_space.hpp"

namespace dicke {

struct AsymptoteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Confirmed exponential growth: the system diverges, no limit. Raised only
// on dynamic evidence — a propagator-squaring check, or the trajectory
// itself overflowing — because eigenvalues computed on the badly
// conditioned zero clusters of these generators can scatter across the
// positive half-plane without any real growth behind them.
struct UnstableSystemError : AsymptoteError {
    using AsymptoteError::AsymptoteError;
};

// An undamped oscillation kept the late-time functional from settling.
struct OscillatorySystemError : AsymptoteError {
    using AsymptoteError::AsymptoteError;
};

// The two routes produced numbers further apart than `agreement_tol`.
struct AsymptoteMismatchError : AsymptoteError {
    using AsymptoteError::AsymptoteError;
};

struct AsymptoteOptions {
    // Rank threshold for the kernel projection: LU pivots below
    // singular_rel_tol times the largest pivot count as zero.
    double singular_rel_tol{1e-12};
    // Noise floor for eigenvalue classification: eigenvalues with
    // |Re lambda| <= rate_floor_rel * ||G||_inf count as members of the
    // zero cluster when picking the slowest decay rate and when screening
    // for growth. Exact zero eigenvalues of these generators can be so
    // badly conditioned (kernel nearly parallel to range) that the
    // eigensolver scatters them past any static floor, so values above it
    // are only candidates: growth is confirmed dynamically before
    // UnstableSystemError is raised, and the drift certificate corrects a
    // too-optimistic slowest-rate guess by doubling the horizon.
    double rate_floor_rel{1e-6};
    // Minimum cosine of the largest principal angle between the kernel and
    // the orthogonal complement of the range. Below this the oblique kernel
    // projection amplifies rounding past agreement_tol, so the projection
    // route is dropped (spectral_available = false) rather than trusted.
    double kernel_overlap_floor{1e-7};
    // Integration horizon T = max(horizon_floor_ns, horizon_rate_factor / r)
    // where r is the slowest nonzero decay rate.
    double horizon_floor_ns{1000.0};
    double horizon_rate_factor{20.0};
    // |F(2T) - F(T)| must fall below this for the horizon value to count.
    double certificate_tol{1e-9};
    // Certificate attempts: the horizon doubles after each failed attempt,
    // so a decay mode hidden inside the zero cluster still gets reached.
    int max_horizon_doublings{20};
    // Maximum allowed |spectral - horizon| when both routes are available.
    double agreement_tol{1e-8};
    double rel_tol{1e-9};
    double abs_tol{1e-12};
};

struct AsymptoteResult {
    double value{0.0};           // spectral route when available, horizon otherwise
    double spectral_value{0.0};  // meaningful only if spectral_available
    double horizon_value{0.0};
    bool spectral_available{false};
    double horizon_ns{0.0};      // the T actually used
    double slowest_rate{0.0};    // slowest nonzero decay rate in 1/ns (0 if none)
    // Drift bound the certificate was accepted under: certificate_tol
    // unless the fallback integrator's measured rounding plateau forced a
    // wider (honest) one.
    double certificate_tol_used{0.0};
};

// Limit of weights . x(t) for t -> infinity under d/dt x = G x.
//
// Route one projects x0 onto the kernel of G along the range of G using
// rank-revealing LU factorizations; it is skipped (spectral_available =
// false) when the zero eigenvalue is defective, in which case the kernel
// and the range overlap and no such projection exists. Route two integrates
// one trajectory to a horizon far beyond the slowest decay — an adaptive
// explicit leg across the transient, then A-stable implicit legs through
// the settled regime — and certifies convergence by comparing F(T) against
// F(2T), doubling T after every failed certificate. When both routes run,
// they must agree to `agreement_tol` or AsymptoteMismatchError is thrown.
AsymptoteResult asymptote_of(const Eigen::SparseMatrix<double>& gen, const Eigen::VectorXd& x0,
                             const Eigen::VectorXd& weights, const AsymptoteOptions& opts = {});

// Late-time fluorescence of one manifold.
AsymptoteResult asymptote(const RateGenerator& gen, const PopulationState& init,
                          const AsymptoteOptions& opts = {});

} // namespace dicke
