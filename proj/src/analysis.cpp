// analysis.cpp — Derived quantities on top of the integrated rate systems

#include "dicke/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dicke {

namespace {

// Bisection on a dense interpolant of the solution over one bracketing
// sample interval. The interpolant is continuous, so the bracket shrinks to
// the floating-point limit without integration noise re-randomizing f.
double refine_crossing(const DensePath& path, const Eigen::VectorXd& weights, double lo,
                       double hi, double f_lo, double target) {
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = path.value(mid, weights);
        if (std::abs(f_mid) < target || hi - lo < 1e-15 * std::max(1.0, std::abs(hi))) {
            return mid;
        }
        if ((f_lo < 0.0) == (f_mid < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

struct TwoManifoldSystem {
    Eigen::SparseMatrix<double> gen;  // blockdiag of the two generators
    Eigen::VectorXd x0;
    Eigen::VectorXd w_total;          // manifold-weighted fluorescence functional
    Eigen::VectorXd w_sigma0;
    Eigen::VectorXd w_sigma1;
};

TwoManifoldSystem combine(const RateGenerator& g0, const RateGenerator& g1,
                          const PopulationState& init0, const PopulationState& init1) {
    const auto d0 = static_cast<Eigen::Index>(g0.dim());
    const auto d1 = static_cast<Eigen::Index>(g1.dim());

    TwoManifoldSystem sys;
    sys.gen.resize(d0 + d1, d0 + d1);
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(g0.matrix().nonZeros() + g1.matrix().nonZeros()));
    for (int k = 0; k < g0.matrix().outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(g0.matrix(), k); it; ++it) {
            entries.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int k = 0; k < g1.matrix().outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(g1.matrix(), k); it; ++it) {
            entries.emplace_back(d0 + it.row(), d0 + it.col(), it.value());
        }
    }
    sys.gen.setFromTriplets(entries.begin(), entries.end());
    sys.gen.makeCompressed();

    sys.x0.resize(d0 + d1);
    sys.x0 << init0.to_raw(), init1.to_raw();

    const Eigen::VectorXd w0 = fluorescence_weights(g0.space(), g0.params(), g0.flags());
    const Eigen::VectorXd w1 = fluorescence_weights(g1.space(), g1.params(), g1.flags());
    sys.w_sigma0 = Eigen::VectorXd::Zero(d0 + d1);
    sys.w_sigma1 = Eigen::VectorXd::Zero(d0 + d1);
    sys.w_sigma0.head(d0) = g0.params().weight * w0;
    sys.w_sigma1.tail(d1) = g1.params().weight * w1;
    sys.w_total = sys.w_sigma0 + sys.w_sigma1;
    return sys;
}

} // namespace

NormalizedTrace normalize(const std::vector<double>& raw) {
    NormalizedTrace out;
    out.values = raw;
    if (raw.empty()) {
        out.degenerate = true;
        return out;
    }
    const double peak = *std::max_element(raw.begin(), raw.end());
    if (!(peak > 0.0)) {
        out.degenerate = true;
        return out;
    }
    out.scale = peak;
    for (double& v : out.values) v /= peak;
    return out;
}

std::vector<double> find_zero_crossings(const Eigen::SparseMatrix<double>& gen,
                                        const Eigen::VectorXd& x0,
                                        const Eigen::VectorXd& weights,
                                        const std::vector<double>& times,
                                        const std::vector<double>& values, double rel_tol,
                                        double abs_tol) {
    if (times.size() != values.size()) {
        throw std::invalid_argument("find_zero_crossings: times and values sizes differ");
    }
    if (times.size() < 2) return {};
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) {
            throw std::invalid_argument("find_zero_crossings: time grid must increase strictly");
        }
    }

    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return {};  // identically zero trace: no sign changes
    const double target = 1e-12 * scale;

    // States at the left bracket edges come from one shared integration pass.
    const RawTrajectory traj = integrate_matrix(gen, x0, times, rel_tol, abs_tol, 0.0);

    std::vector<double> crossings;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double f_lo = values[k];
        const double f_hi = values[k + 1];
        if (f_lo == 0.0) {
            if (crossings.empty() || crossings.back() != times[k]) crossings.push_back(times[k]);
            continue;
        }
        if ((f_lo < 0.0) == (f_hi < 0.0) || f_hi == 0.0) continue;

        const DensePath path(gen, traj.states[k], times[k], times[k + 1], rel_tol, abs_tol);
        crossings.push_back(
            refine_crossing(path, weights, times[k], times[k + 1], f_lo, target));
    }
    return crossings;
}

SimulationResult run_model(int n_emitters, const TermFlags& flags,
                           const SpinManifoldParams& sigma0, const SpinManifoldParams& sigma1,
                           const IntegratorConfig& integ, const AsymptoteOptions& asym,
                           const VerdictTolerances& tol) {
    validate(integ);
    if (std::abs(sigma0.weight + sigma1.weight - 1.0) > 1e-12) {
        throw std::invalid_argument("run_model: manifold weights must sum to 1");
    }

    const StateSpace space = build_state_space(n_emitters);
    const RateGenerator g0 = build_generator(space, sigma0, flags);
    const RateGenerator g1 = build_generator(space, sigma1, flags);
    const PopulationState init0 = initial_state(space, Manifold::sigma0);
    const PopulationState init1 = initial_state(space, Manifold::sigma_pm1);

    const TwoManifoldSystem sys = combine(g0, g1, init0, init1);
    const std::vector<double> grid = uniform_grid(integ.t_end_ns, integ.samples);
    const RawTrajectory traj =
        integrate_matrix(sys.gen, sys.x0, grid, integ.rel_tol, integ.abs_tol, integ.max_step_ns);

    SimulationResult res;
    res.flags = flags;
    res.times = traj.times;
    res.total.reserve(traj.states.size());
    res.manifold0.reserve(traj.states.size());
    res.manifold1.reserve(traj.states.size());
    for (const Eigen::VectorXd& x : traj.states) {
        res.total.push_back(sys.w_total.dot(x));
        res.manifold0.push_back(sys.w_sigma0.dot(x));
        res.manifold1.push_back(sys.w_sigma1.dot(x));
    }
    res.normalized = normalize(res.total);

    res.asymptote_sigma0 = asymptote(g0, init0, asym);
    res.asymptote_sigma1 = asymptote(g1, init1, asym);
    res.asymptote_total = sigma0.weight * res.asymptote_sigma0.value +
                          sigma1.weight * res.asymptote_sigma1.value;

    const auto off0 = g0.min_off_diagonal();
    const auto off1 = g1.min_off_diagonal();
    res.min_off_diagonal = std::min(off0.value, off1.value);

    // Verdict works in normalized units so the thresholds mean the same
    // thing for every parameter set.
    PhysicalityVerdict verdict;
    const double scale = res.normalized.degenerate ? 1.0 : res.normalized.scale;
    auto min_it = std::min_element(res.normalized.values.begin(), res.normalized.values.end());
    verdict.most_negative = *min_it;
    verdict.most_negative_t =
        res.times[static_cast<std::size_t>(min_it - res.normalized.values.begin())];
    verdict.nonnegative = verdict.most_negative >= -tol.negativity;
    verdict.crossing_times_ns = find_zero_crossings(sys.gen, sys.x0, sys.w_total, res.times,
                                                    res.total, integ.rel_tol, integ.abs_tol);
    verdict.asymptote_normalized = res.asymptote_total / scale;
    verdict.asymptote_zero = std::abs(verdict.asymptote_normalized) <= tol.asymptote;
    res.verdict = verdict;

    SimulationResult::Burst burst;
    for (std::size_t k = 1; k < res.normalized.values.size(); ++k) {
        if (res.normalized.values[k] > burst.height) {
            burst.height = res.normalized.values[k];
            burst.t_ns = res.times[k];
        }
    }
    res.post_initial_peak = burst;
    return res;
}

ComparisonReport compare_models(int n_emitters, const SpinManifoldParams& sigma0,
                                const SpinManifoldParams& sigma1, const IntegratorConfig& integ,
                                const AsymptoteOptions& asym, const VerdictTolerances& tol) {
    ComparisonReport report;
    report.n_emitters = n_emitters;
    report.original = run_model(n_emitters, TermFlags::model_a(), sigma0, sigma1, integ, asym, tol);
    report.corrected = run_model(n_emitters, TermFlags::model_b(), sigma0, sigma1, integ, asym, tol);
    return report;
}

} // namespace dicke
