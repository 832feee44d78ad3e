// generator.cpp — Assembly of the rate-equation generators from exact integer ratios

#include "dicke/generator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace dicke {

namespace {

// Exact ratio of 64-bit integers. Magnitudes stay tiny (quantum numbers are
// bounded by the emitter cap), so no reduction is needed before the final
// division.
struct Ratio {
    long long num{0};
    long long den{1};

    friend Ratio operator*(Ratio a, Ratio b) { return {a.num * b.num, a.den * b.den}; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Factors of the dephasing bracket and the intersystem-crossing terms, in
// doubled quantum numbers tj = 2J, tm = 2M of the *target* rung (J, M).
// The feed terms reference the source rung (J+1/2, M+1/2) through the
// shifted values tj+1, tm+1.

Ratio prefactor(int tj, bool corrected) {  // A: 2J vs 1
    return corrected ? Ratio{1, 1} : Ratio{tj, 1};
}

Ratio loss_scale(int tj, bool corrected) {  // B: 1 vs 2J
    return corrected ? Ratio{tj, 1} : Ratio{1, 1};
}

Ratio loss_weight(int tj, int tm, bool corrected) {  // C: 1-|M/J|^2 vs |M/J|^2
    const long long j2 = static_cast<long long>(tj) * tj;
    const long long m2 = static_cast<long long>(tm) * tm;
    return corrected ? Ratio{m2, j2} : Ratio{j2 - m2, j2};
}

Ratio feed_sign(bool corrected) {  // D: +2 vs -2
    return corrected ? Ratio{-2, 1} : Ratio{2, 1};
}

// (J+1/2) * E with E = 1-|y|^2 vs |y|^2, y = (M+1/2)/(J+1/2). The source
// rung has doubled numbers (tj+1, tm+1).
Ratio feed_weight_with_spin(int tj, int tm, bool corrected) {
    const long long sj = tj + 1;
    const long long sm = tm + 1;
    const long long num = corrected ? sm * sm : sj * sj - sm * sm;
    return Ratio{num, 2 * sj};
}

Ratio isc_feed(int tj, int tm, bool corrected) {  // F: (J+M+1) vs (J+M+1)(J-M+1)
    const long long up = tj + tm + 2;
    const long long down = tj - tm + 2;
    return corrected ? Ratio{up * down, 4} : Ratio{up, 2};
}

Ratio isc_loss(int tj, int tm, bool corrected) {  // G: (J+M) vs (J+M)(J-M+1)
    const long long up = tj + tm;
    const long long down = tj - tm + 2;
    return corrected ? Ratio{up * down, 4} : Ratio{up, 2};
}

// H * 2J: source weight of the decoupled pool, H = 1-|M/J|^2 vs |M/J|^2.
Ratio decoupling_source(int tj, int tm, bool corrected) {
    const long long j2 = static_cast<long long>(tj) * tj;
    const long long m2 = static_cast<long long>(tm) * tm;
    return corrected ? Ratio{m2, tj} : Ratio{j2 - m2, tj};
}

// J(J+1) - M(M+1) — the emission coefficient into (J, M) from (J, M+1),
// and with shift = -1 the loss coefficient J(J+1) - M(M-1) of (J, M).
long long emission_coefficient(int tj, int tm, int shift) {
    const long long jj = static_cast<long long>(tj) * (tj + 2);
    const long long mm = static_cast<long long>(tm) * (tm + 2 * shift);
    return (jj - mm) / 4;  // exact: the numerator is always divisible by 4
}

} // namespace

void validate(const SpinManifoldParams& params) {
    const auto ok_rate = [](double r) { return std::isfinite(r) && r >= 0.0; };
    if (!ok_rate(params.gamma) || !ok_rate(params.gamma_d) || !ok_rate(params.gamma_isc)) {
        throw std::invalid_argument(
            "SpinManifoldParams: rates must be finite and non-negative");
    }
    if (!std::isfinite(params.weight) || params.weight < 0.0 || params.weight > 1.0) {
        throw std::invalid_argument("SpinManifoldParams: weight must lie in [0, 1]");
    }
}

double rate_from_two_pi_mhz(double v) {
    return 2.0 * std::numbers::pi * v * 1e-3;
}

char term_letter(Term t) {
    return static_cast<char>('A' + static_cast<int>(t));
}

const char* term_name(Term t) {
    switch (t) {
        case Term::dephasing_prefactor:  return "dephasing-prefactor";
        case Term::dephasing_loss_scale: return "dephasing-loss-scale";
        case Term::dephasing_loss_weight:return "dephasing-loss-weight";
        case Term::dephasing_feed_sign:  return "dephasing-feed-sign";
        case Term::dephasing_feed_weight:return "dephasing-feed-weight";
        case Term::isc_feed:             return "isc-feed";
        case Term::isc_loss:             return "isc-loss";
        case Term::decoupling_weight:    return "decoupling-weight";
        case Term::emission_weight:      return "emission-weight";
    }
    throw std::invalid_argument("term_name: unknown term");
}

TermFlags TermFlags::with(Term t, bool use_corrected) const {
    TermFlags out = *this;
    out.corrected[static_cast<int>(t)] = use_corrected;
    return out;
}

bool TermFlags::all_original() const {
    for (bool c : corrected)
        if (c) return false;
    return true;
}

bool TermFlags::all_corrected() const {
    for (bool c : corrected)
        if (!c) return false;
    return true;
}

std::string TermFlags::label() const {
    if (all_original()) return "a";
    if (all_corrected()) return "b";
    std::string pattern;
    for (bool c : corrected) pattern += c ? 'b' : 'a';
    return pattern;
}

TermFlags TermFlags::from_pattern(const std::string& pattern) {
    TermFlags f;
    if (pattern == "a") return model_a();
    if (pattern == "b") return model_b();
    if (pattern.size() != term_count) {
        throw std::invalid_argument("TermFlags::from_pattern: expected \"a\", \"b\" or " +
                                    std::to_string(term_count) + " characters, got \"" +
                                    pattern + "\"");
    }
    for (int i = 0; i < term_count; ++i) {
        if (pattern[i] == 'a') f.corrected[i] = false;
        else if (pattern[i] == 'b') f.corrected[i] = true;
        else throw std::invalid_argument(
                 "TermFlags::from_pattern: pattern may only contain 'a' and 'b'");
    }
    return f;
}

RateGenerator::OffDiagonal RateGenerator::min_off_diagonal() const {
    OffDiagonal best{std::numeric_limits<double>::infinity(), 0, 0};
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, k); it; ++it) {
            if (it.row() == it.col()) continue;
            if (it.value() < best.value) {
                best = {it.value(), static_cast<std::size_t>(it.row()),
                        static_cast<std::size_t>(it.col())};
            }
        }
    }
    if (!std::isfinite(best.value)) best.value = 0.0;  // fully diagonal generator
    return best;
}

RateGenerator build_generator(const StateSpace& space, const SpinManifoldParams& params,
                              const TermFlags& flags) {
    validate(params);
    if (space.size() == 0) {
        throw std::invalid_argument("build_generator: state space is empty");
    }

    const auto slots = static_cast<Eigen::Index>(space.size());
    const Eigen::Index dim = slots + 1;  // trailing entry is the decoupled pool
    const Eigen::Index pool = slots;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(dim) * 4);

    const bool fb = flags[Term::dephasing_prefactor];
    const bool fB = flags[Term::dephasing_loss_scale];
    const bool fC = flags[Term::dephasing_loss_weight];
    const bool fD = flags[Term::dephasing_feed_sign];
    const bool fE = flags[Term::dephasing_feed_weight];
    const bool fF = flags[Term::isc_feed];
    const bool fG = flags[Term::isc_loss];
    const bool fH = flags[Term::decoupling_weight];

    for (Eigen::Index row = 0; row < slots; ++row) {
        const DickeIndex idx = space.index(static_cast<std::size_t>(row));
        const int tj = idx.j.twice;
        const int tm = idx.m.twice;

        double diag = 0.0;

        // Collective emission down the ladder. The loss coefficient vanishes
        // at the bottom rung M = -J by construction.
        diag -= params.gamma * static_cast<double>(emission_coefficient(tj, tm, -1));
        if (tm + 2 <= tj) {
            const auto above = space.slot({HalfInt::from_twice(tj), HalfInt::from_twice(tm + 2)});
            entries.emplace_back(row, static_cast<Eigen::Index>(above),
                                 params.gamma *
                                     static_cast<double>(emission_coefficient(tj, tm, +1)));
        }

        // Dephasing bracket: -gamma_d * A * [ B*C*P(J,M) + D*(J+1/2)*E*P(J+1/2,M+1/2) ].
        const Ratio a = prefactor(tj, fb);
        diag -= params.gamma_d * (a * loss_scale(tj, fB) * loss_weight(tj, tm, fC)).to_double();
        if (tj + 1 <= space.n_emitters()) {
            const auto source =
                space.slot({HalfInt::from_twice(tj + 1), HalfInt::from_twice(tm + 1)});
            const double feed =
                -params.gamma_d *
                (a * feed_sign(fD) * feed_weight_with_spin(tj, tm, fE)).to_double();
            entries.emplace_back(row, static_cast<Eigen::Index>(source), feed);
        }

        // Intersystem crossing: feed from (J+1/2, M+1/2), loss from (J, M).
        // The loss vanishes at M = -J, so the ladder bottoms keep whatever
        // the other terms leave there.
        diag -= params.gamma_isc * isc_loss(tj, tm, fG).to_double();
        if (tj + 1 <= space.n_emitters()) {
            const auto source =
                space.slot({HalfInt::from_twice(tj + 1), HalfInt::from_twice(tm + 1)});
            entries.emplace_back(row, static_cast<Eigen::Index>(source),
                                 params.gamma_isc * isc_feed(tj, tm, fF).to_double());
        }

        entries.emplace_back(row, row, diag);

        // Every rung feeds the decoupled pool at gamma_d * H * 2J.
        const double pool_feed = params.gamma_d * decoupling_source(tj, tm, fH).to_double();
        if (pool_feed != 0.0) {
            entries.emplace_back(pool, row, pool_feed);
        }
    }

    // Decoupled emitters radiate (and cross over) independently.
    entries.emplace_back(pool, pool, -(params.gamma + params.gamma_isc));

    RateGenerator gen;
    gen.space_ = space;
    gen.params_ = params;
    gen.flags_ = flags;
    gen.matrix_.resize(dim, dim);
    gen.matrix_.setFromTriplets(entries.begin(), entries.end());
    gen.matrix_.makeCompressed();
    return gen;
}

Eigen::VectorXd fluorescence_weights(const StateSpace& space, const SpinManifoldParams& params,
                                     const TermFlags& flags) {
    validate(params);
    const auto slots = static_cast<Eigen::Index>(space.size());
    Eigen::VectorXd w(slots + 1);
    // I selects the projection factor: M(M+1) originally, M(M-1) corrected.
    const int shift = flags[Term::emission_weight] ? -1 : +1;
    for (Eigen::Index s = 0; s < slots; ++s) {
        const DickeIndex idx = space.index(static_cast<std::size_t>(s));
        w(s) = params.gamma *
               static_cast<double>(emission_coefficient(idx.j.twice, idx.m.twice, shift));
    }
    w(slots) = params.gamma;
    return w;
}

double fluorescence(const PopulationState& state, const StateSpace& space,
                    const SpinManifoldParams& params, const TermFlags& flags) {
    if (state.p.size() != static_cast<Eigen::Index>(space.size())) {
        throw std::invalid_argument("fluorescence: state and space sizes disagree");
    }
    return fluorescence_weights(space, params, flags).dot(state.to_raw());
}

double total_fluorescence(const PopulationState& state0, const SpinManifoldParams& params0,
                          const PopulationState& state1, const SpinManifoldParams& params1,
                          const StateSpace& space, const TermFlags& flags) {
    if (std::abs(params0.weight + params1.weight - 1.0) > 1e-12) {
        throw std::invalid_argument("total_fluorescence: manifold weights must sum to 1");
    }
    return params0.weight * fluorescence(state0, space, params0, flags) +
           params1.weight * fluorescence(state1, space, params1, flags);
}

} // namespace dicke
