// analysis.hpp — Trace normalization, sign changes, physicality verdicts, model comparison

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/asymptote.hpp"
#include "dicke/generator.hpp"
#include "dicke/integrate.hpp"
#include "dicke/state_space.hpp"

namespace dicke {

// Trace divided by its maximum, matching how measured count curves are
// plotted. A trace whose maximum is not positive cannot be scaled that way;
// it is returned untouched with `degenerate` set.
struct NormalizedTrace {
    std::vector<double> values;
    double scale{1.0};
    bool degenerate{false};
};

NormalizedTrace normalize(const std::vector<double>& raw);

// Times where weights . x(t) changes sign, refined from the sampled
// bracketing intervals by bisection on the dense interpolant until
// |f| < 1e-12 * max|values|. The grid must increase strictly and `values`
// must be the functional sampled on exactly that grid with state `x0` at
// times.front().
std::vector<double> find_zero_crossings(const Eigen::SparseMatrix<double>& gen,
                                        const Eigen::VectorXd& x0,
                                        const Eigen::VectorXd& weights,
                                        const std::vector<double>& times,
                                        const std::vector<double>& values,
                                        double rel_tol = 1e-9, double abs_tol = 1e-12);

struct PhysicalityVerdict {
    bool nonnegative{true};       // normalized trace never dips below -negativity_tol
    double most_negative{0.0};    // smallest normalized value
    double most_negative_t{0.0};
    std::vector<double> crossing_times_ns;
    bool asymptote_zero{true};    // |normalized asymptote| <= asymptote_tol
    double asymptote_normalized{0.0};

    bool physical() const { return nonnegative && asymptote_zero; }
};

struct VerdictTolerances {
    double negativity{1e-9};
    double asymptote{1e-6};
};

// Fluorescence of both manifolds of one term selection, integrated as a
// single block-diagonal system so every derived quantity refers to the same
// numerical solution.
struct SimulationResult {
    TermFlags flags;
    std::vector<double> times;
    std::vector<double> total;           // manifold-weighted fluorescence, 1/ns
    std::vector<double> manifold0;       // sigma = 0 share (weighted)
    std::vector<double> manifold1;       // sigma = +/-1 share (weighted)
    NormalizedTrace normalized;          // of `total`
    PhysicalityVerdict verdict;
    AsymptoteResult asymptote_sigma0;
    AsymptoteResult asymptote_sigma1;
    double asymptote_total{0.0};
    double min_off_diagonal{0.0};        // most negative off-diagonal entry, both manifolds

    struct Burst {
        double t_ns{0.0};
        double height{0.0};  // normalized units
    };
    Burst post_initial_peak;             // maximum over the samples after t = 0
};

SimulationResult run_model(int n_emitters, const TermFlags& flags,
                           const SpinManifoldParams& sigma0, const SpinManifoldParams& sigma1,
                           const IntegratorConfig& integ, const AsymptoteOptions& asym = {},
                           const VerdictTolerances& tol = {});

struct ComparisonReport {
    int n_emitters{0};
    SimulationResult original;   // all terms in their published form
    SimulationResult corrected;  // all terms replaced
};

ComparisonReport compare_models(int n_emitters, const SpinManifoldParams& sigma0,
                                const SpinManifoldParams& sigma1, const IntegratorConfig& integ,
                                const AsymptoteOptions& asym = {},
                                const VerdictTolerances& tol = {});

} // namespace dicke
