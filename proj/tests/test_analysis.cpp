// test_analysis.cpp — Normalization, crossings, late-time limits, and model verdicts

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/analysis.hpp"
#include "dicke/asymptote.hpp"
#include "dicke/integrate.hpp"
#include "dicke/run_config.hpp"

using namespace dicke;

namespace {

Eigen::SparseMatrix<double> sparse_from(const Eigen::MatrixXd& dense) {
    return dense.sparseView();
}

Eigen::SparseMatrix<double> rotation(double omega) {
    Eigen::MatrixXd m(2, 2);
    m << 0.0, omega, -omega, 0.0;
    return sparse_from(m);
}

} // namespace

TEST_CASE("normalization divides by a positive maximum") {
    const NormalizedTrace t = normalize({1.0, 2.0, 4.0});
    CHECK(!t.degenerate);
    CHECK(t.scale == 4.0);
    CHECK(t.values == std::vector<double>{0.25, 0.5, 1.0});

    const NormalizedTrace flat = normalize({0.5});
    CHECK(flat.scale == 0.5);
    CHECK(flat.values == std::vector<double>{1.0});
}

TEST_CASE("traces without a positive maximum are returned untouched") {
    const NormalizedTrace t = normalize({-1.0, 0.0, -3.0});
    CHECK(t.degenerate);
    CHECK(t.scale == 1.0);
    CHECK(t.values == std::vector<double>{-1.0, 0.0, -3.0});
}

TEST_CASE("zero crossings of a pure rotation land on the half-period grid") {
    const double omega = 1.0;
    const auto gen = rotation(omega);
    Eigen::VectorXd x0(2);
    x0 << 1.0, 0.0;
    Eigen::VectorXd w(2);
    w << 1.0, 0.0;  // the functional is cos(omega t)

    const std::vector<double> times = uniform_grid(10.0, 101);
    const RawTrajectory traj = integrate_matrix(gen, x0, times, 1e-11, 1e-14);
    std::vector<double> values;
    values.reserve(times.size());
    for (const Eigen::VectorXd& x : traj.states) values.push_back(w.dot(x));

    const std::vector<double> crossings =
        find_zero_crossings(gen, x0, w, times, values, 1e-11, 1e-14);
    REQUIRE(crossings.size() == 3);
    const double pi = std::numbers::pi;
    CHECK(std::abs(crossings[0] - pi / 2.0) < 1e-8);
    CHECK(std::abs(crossings[1] - 3.0 * pi / 2.0) < 1e-8);
    CHECK(std::abs(crossings[2] - 5.0 * pi / 2.0) < 1e-8);
}

TEST_CASE("a one-signed trace yields no crossings") {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = -0.3;
    const auto gen = sparse_from(m);
    Eigen::VectorXd x0(1), w(1);
    x0 << 1.0;
    w << 1.0;
    const std::vector<double> times = uniform_grid(20.0, 41);
    const RawTrajectory traj = integrate_matrix(gen, x0, times);
    std::vector<double> values;
    for (const Eigen::VectorXd& x : traj.states) values.push_back(w.dot(x));
    CHECK(find_zero_crossings(gen, x0, w, times, values).empty());
}

TEST_CASE("crossing search validates its grid") {
    const auto gen = rotation(1.0);
    Eigen::VectorXd x0(2), w(2);
    x0 << 1.0, 0.0;
    w << 1.0, 0.0;
    CHECK_THROWS_AS(find_zero_crossings(gen, x0, w, {0.0, 1.0}, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(find_zero_crossings(gen, x0, w, {0.0, 1.0, 1.0}, {1.0, 0.5, 0.2}),
                    std::invalid_argument);
}

TEST_CASE("late-time limit of a plainly decaying system is zero by both routes") {
    Eigen::MatrixXd m(2, 2);
    m << -0.5, 0.2, 0.1, -0.9;
    Eigen::VectorXd x0(2), w(2);
    x0 << 1.0, 0.5;
    w << 1.0, 2.0;
    const AsymptoteResult a = asymptote_of(sparse_from(m), x0, w);
    CHECK(a.spectral_available);
    CHECK(a.spectral_value == 0.0);  // empty kernel: the limit state vanishes
    CHECK(std::abs(a.horizon_value) < 1e-9);
    CHECK(a.value == 0.0);
    CHECK(a.slowest_rate > 0.0);
    CHECK(a.certificate_tol_used >= 1e-9);
}

TEST_CASE("late-time limit projects onto the kernel when one exists") {
    // x1' = -x1, x2' = +x1: everything initially in x1 ends up in x2.
    Eigen::MatrixXd m(2, 2);
    m << -1.0, 0.0, 1.0, 0.0;
    Eigen::VectorXd x0(2), w(2);
    x0 << 1.0, 0.0;
    w << 0.0, 1.0;
    const AsymptoteResult a = asymptote_of(sparse_from(m), x0, w);
    CHECK(a.spectral_available);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.horizon_value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("a defective decaying pair still reports a clean zero limit") {
    // Jordan block at -1: no kernel, every mode decays, limit 0.
    Eigen::MatrixXd m(2, 2);
    m << -1.0, 1.0, 0.0, -1.0;
    Eigen::VectorXd x0(2), w(2);
    x0 << 0.0, 1.0;
    w << 1.0, 1.0;
    const AsymptoteResult a = asymptote_of(sparse_from(m), x0, w);
    CHECK(a.spectral_available);
    CHECK(a.value == 0.0);
}

TEST_CASE("linear growth exhausts the drift certificate") {
    // Jordan block at 0: x2 feeds x1 forever, the functional never settles.
    Eigen::MatrixXd m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    Eigen::VectorXd w(2);
    w << 1.0, 0.0;

    AsymptoteOptions opts;
    opts.horizon_floor_ns = 1.0;
    opts.max_horizon_doublings = 6;

    Eigen::VectorXd growing(2);
    growing << 0.0, 1.0;
    CHECK_THROWS_AS(asymptote_of(sparse_from(m), growing, w, opts), AsymptoteError);

    // Starting inside the kernel, the same system sits still: the horizon
    // route certifies immediately, while the defective zero keeps the
    // projection route honestly unavailable.
    Eigen::VectorXd resting(2);
    resting << 1.0, 0.0;
    const AsymptoteResult a = asymptote_of(sparse_from(m), resting, w, opts);
    CHECK(!a.spectral_available);
    CHECK(a.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("confirmed exponential growth raises the instability error") {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 1.0;
    Eigen::VectorXd x0(1), w(1);
    x0 << 1.0;
    w << 1.0;
    CHECK_THROWS_AS(asymptote_of(sparse_from(m), x0, w), UnstableSystemError);
}

TEST_CASE("an undamped oscillation is reported as such") {
    Eigen::VectorXd x0(2), w(2);
    x0 << 1.0, 0.0;
    w << 1.0, 0.0;
    AsymptoteOptions opts;
    opts.horizon_floor_ns = 1.0;
    opts.max_horizon_doublings = 4;
    CHECK_THROWS_AS(asymptote_of(rotation(1.0), x0, w, opts), OscillatorySystemError);
}

TEST_CASE("late-time evaluation rejects malformed input") {
    Eigen::MatrixXd m(2, 2);
    m << -1.0, 0.0, 0.0, -1.0;
    Eigen::VectorXd x0(2), w(2);
    x0 << 1.0, 0.0;
    w << 1.0, 1.0;

    Eigen::VectorXd bad = x0;
    bad(0) = std::nan("");
    CHECK_THROWS_AS(asymptote_of(sparse_from(m), bad, w), std::invalid_argument);

    Eigen::VectorXd short_w(1);
    short_w << 1.0;
    CHECK_THROWS_AS(asymptote_of(sparse_from(m), x0, short_w), std::invalid_argument);

    Eigen::SparseMatrix<double> rect(2, 3);
    CHECK_THROWS_AS(asymptote_of(rect, x0, w), std::invalid_argument);
}

TEST_CASE("both routes agree on random conserving rate systems") {
    // Column sums of zero make a proper rate generator: population moves,
    // nothing leaves, the stationary distribution is the late-time state.
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        const int dim = 4;
        Eigen::MatrixXd m(dim, dim);
        for (int c = 0; c < dim; ++c) {
            double off = 0.0;
            for (int r = 0; r < dim; ++r) {
                if (r == c) continue;
                m(r, c) = uni(rng);
                off += m(r, c);
            }
            m(c, c) = -off;
        }
        Eigen::VectorXd x0 = Eigen::VectorXd::Zero(dim);
        x0(0) = 1.0;
        Eigen::VectorXd w(dim);
        for (int r = 0; r < dim; ++r) w(r) = uni(rng);

        // asymptote_of itself enforces the cross-route agreement; a
        // disagreement would throw AsymptoteMismatchError here.
        const AsymptoteResult a = asymptote_of(sparse_from(m), x0, w);
        CHECK(a.spectral_available);

        // Corroborate against a plain long integration.
        const Eigen::VectorXd late =
            integrate_matrix(sparse_from(m), x0, {0.0, 400.0}, 1e-12, 1e-14).states[1];
        CHECK(a.value == doctest::Approx(w.dot(late)).epsilon(1e-8));
    }
}

TEST_CASE("the measured late-time level of the two-emitter run is reproduced") {
    const RunConfig cfg = preset("n2");
    const StateSpace space = build_state_space(cfg.n_emitters);
    const RateGenerator gen =
        build_generator(space, cfg.manifold_sigma0(), TermFlags::model_a());
    const AsymptoteResult a = asymptote(gen, initial_state(space, Manifold::sigma0));
    CHECK(a.spectral_available);
    CHECK(a.value == doctest::Approx(0.005999193594172902).epsilon(1e-9));
    CHECK(std::abs(a.horizon_value - a.spectral_value) < 1e-8);
}

TEST_CASE("seven-emitter verdicts separate the two selections") {
    const RunConfig cfg = preset("n7");
    const ComparisonReport report = compare_models(
        cfg.n_emitters, cfg.manifold_sigma0(), cfg.manifold_sigma1(), cfg.integrator());

    CHECK(report.n_emitters == 7);
    CHECK(report.original.flags.all_original());
    CHECK(report.corrected.flags.all_corrected());

    // The published selection dips negative, crosses zero, and settles on
    // a nonzero level; the corrected one stays physical throughout.
    CHECK(!report.original.verdict.nonnegative);
    CHECK(report.original.verdict.most_negative < -1e-6);
    CHECK(!report.original.verdict.crossing_times_ns.empty());
    CHECK(!report.original.verdict.asymptote_zero);
    CHECK(report.original.verdict.asymptote_normalized < 0.0);
    CHECK(!report.original.verdict.physical());
    CHECK(report.original.min_off_diagonal < 0.0);

    CHECK(report.corrected.verdict.nonnegative);
    CHECK(report.corrected.verdict.crossing_times_ns.empty());
    CHECK(report.corrected.verdict.asymptote_zero);
    CHECK(report.corrected.verdict.physical());
    CHECK(report.corrected.min_off_diagonal >= 0.0);

    // Both totals start from the same value: the initial distribution is
    // symmetric in m, so the differing emission weights average out at t=0,
    // and both traces peak right there.
    CHECK(report.original.normalized.scale == report.corrected.normalized.scale);
    CHECK(report.original.normalized.values.front() == 1.0);
    CHECK(report.corrected.normalized.values.front() == 1.0);
}

TEST_CASE("per-manifold shares assemble the weighted total") {
    const RunConfig cfg = preset("n2");
    const SimulationResult r =
        run_model(cfg.n_emitters, TermFlags::model_b(), cfg.manifold_sigma0(),
                  cfg.manifold_sigma1(), cfg.integrator());

    REQUIRE(r.times.size() == static_cast<std::size_t>(cfg.samples));
    REQUIRE(r.total.size() == r.times.size());
    for (std::size_t k = 0; k < r.total.size(); ++k) {
        CHECK(r.total[k] ==
              doctest::Approx(r.manifold0[k] + r.manifold1[k]).epsilon(1e-12));
        CHECK(r.normalized.values[k] * r.normalized.scale ==
              doctest::Approx(r.total[k]).epsilon(1e-12));
    }

    CHECK(r.asymptote_total ==
          cfg.sigma0_weight * r.asymptote_sigma0.value +
              (1.0 - cfg.sigma0_weight) * r.asymptote_sigma1.value);

    // The burst tracker looks strictly after the first sample.
    CHECK(r.post_initial_peak.t_ns >= r.times[1]);
    CHECK(r.post_initial_peak.height <= 1.0);
}

TEST_CASE("model runs validate weights and grids") {
    const RunConfig cfg = preset("n2");
    SpinManifoldParams s0 = cfg.manifold_sigma0();
    SpinManifoldParams s1 = cfg.manifold_sigma1();
    s1.weight = s0.weight;  // no longer sums to one
    CHECK_THROWS_AS(
        run_model(cfg.n_emitters, TermFlags::model_b(), s0, s1, cfg.integrator()),
        std::invalid_argument);

    IntegratorConfig bad = cfg.integrator();
    bad.samples = 1;
    CHECK_THROWS_AS(run_model(cfg.n_emitters, TermFlags::model_b(), cfg.manifold_sigma0(),
                              cfg.manifold_sigma1(), bad),
                    std::invalid_argument);
}

TEST_CASE("loose verdict tolerances flip the physicality flags") {
    const RunConfig cfg = preset("n2");
    VerdictTolerances loose;
    loose.negativity = 10.0;   // nothing on a normalized trace dips past -10
    loose.asymptote = 10.0;
    const SimulationResult r =
        run_model(cfg.n_emitters, TermFlags::model_a(), cfg.manifold_sigma0(),
                  cfg.manifold_sigma1(), cfg.integrator(), {}, loose);
    CHECK(r.verdict.nonnegative);
    CHECK(r.verdict.asymptote_zero);
    CHECK(r.verdict.physical());
    // The underlying measurements are tolerance-free and still show the
    // pathology.
    CHECK(r.verdict.asymptote_normalized > 1e-4);
}
