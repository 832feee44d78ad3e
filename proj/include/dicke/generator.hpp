// generator.hpp — Rate-equation generators for the collective fluorescence models

#pragma once

#include <array>
#include <cstddef>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/state_space.hpp"

namespace dicke {

// Rate constants of one spin manifold, all in 1/ns. `weight` is the
// probability that a domain sits in this manifold; the two manifolds of a
// run must have weights summing to one.
struct SpinManifoldParams {
    double gamma{0.0};      // collective spontaneous-emission rate
    double gamma_d{0.0};    // dephasing (decoupling) rate
    double gamma_isc{0.0};  // intersystem-crossing rate
    double weight{1.0};

    friend bool operator==(const SpinManifoldParams&, const SpinManifoldParams&) = default;
};

// Throws std::invalid_argument unless all rates are finite and >= 0 and the
// weight lies in [0, 1].
void validate(const SpinManifoldParams& params);

// Converts a rate quoted as v in units of 2*pi MHz to 1/ns.
double rate_from_two_pi_mhz(double v);

// The master equation is written with nine labeled factors, each of which
// has an original form (model a) and a corrected form (model b):
//
//   A  prefactor of the whole dephasing bracket      2J            vs  1
//   B  scale of the dephasing population loss        1             vs  2J
//   C  weight of the dephasing population loss       1-|M/J|^2     vs  |M/J|^2
//   D  sign/scale of the dephasing feed term         +2            vs  -2
//   E  weight of the dephasing feed term             1-|y|^2       vs  |y|^2,  y=(M+1/2)/(J+1/2)
//   F  intersystem-crossing feed coefficient         (J+M+1)       vs  (J+M+1)(J-M+1)
//   G  intersystem-crossing loss coefficient         (J+M)         vs  (J+M)(J-M+1)
//   H  decoupled-pool source weight                  1-|M/J|^2     vs  |M/J|^2
//   I  projection factor in the emission weight      M(M+1)        vs  M(M-1)
//
// The dephasing feed term (D, E) moves population from (J+1/2, M+1/2) into
// (J, M); the intersystem-crossing feed (F) uses the same source rung. The
// emission weight I enters the fluorescence functional as J(J+1) - I.
enum class Term : int {
    dephasing_prefactor = 0,  // A
    dephasing_loss_scale,     // B
    dephasing_loss_weight,    // C
    dephasing_feed_sign,      // D
    dephasing_feed_weight,    // E
    isc_feed,                 // F
    isc_loss,                 // G
    decoupling_weight,        // H
    emission_weight,          // I
};

inline constexpr int term_count = 9;

char term_letter(Term t);        // 'A' .. 'I'
const char* term_name(Term t);   // e.g. "dephasing-prefactor"

// One bool per labeled term: false selects the original factor, true the
// corrected one. Mixed selections are legitimate — that is how the ablation
// mode isolates which correction removes which pathology.
struct TermFlags {
    std::array<bool, term_count> corrected{};

    static constexpr TermFlags model_a() { return TermFlags{}; }
    static constexpr TermFlags model_b() {
        TermFlags f;
        f.corrected.fill(true);
        return f;
    }

    constexpr bool operator[](Term t) const { return corrected[static_cast<int>(t)]; }
    TermFlags with(Term t, bool use_corrected) const;

    bool all_original() const;
    bool all_corrected() const;

    // "a", "b", or the nine-character a/b pattern in term order A..I.
    std::string label() const;
    static TermFlags from_pattern(const std::string& pattern);  // inverse of label()

    friend bool operator==(const TermFlags&, const TermFlags&) = default;
};

// Linear generator G of the closed rate system d/dt x = G x over the raw
// layout [P(slot 0), ..., P(slot S-1), n_nc]. Immutable once built; safe to
// share across threads.
class RateGenerator {
public:
    RateGenerator() = default;

    const StateSpace& space() const { return space_; }
    const SpinManifoldParams& params() const { return params_; }
    const TermFlags& flags() const { return flags_; }

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

    struct OffDiagonal {
        double value{0.0};
        std::size_t row{0};
        std::size_t col{0};
    };
    // Most negative entry outside the diagonal. A proper rate generator has
    // none below zero; the original model produces them via its dephasing
    // feed term.
    OffDiagonal min_off_diagonal() const;

private:
    friend RateGenerator build_generator(const StateSpace&, const SpinManifoldParams&,
                                         const TermFlags&);

    StateSpace space_;
    SpinManifoldParams params_;
    TermFlags flags_;
    Eigen::SparseMatrix<double> matrix_;
};

// Assembles the generator for one manifold. Every coefficient is formed as
// an exact ratio of 64-bit integers in doubled quantum numbers (2J, 2M) and
// converted to double with a single division, so equal-flag builds are
// bitwise reproducible.
RateGenerator build_generator(const StateSpace& space, const SpinManifoldParams& params,
                              const TermFlags& flags);

// Weights w such that the manifold's fluorescence is w . [P..., n_nc]:
// gamma * (J(J+1) - I) per ladder slot and gamma for the decoupled pool.
Eigen::VectorXd fluorescence_weights(const StateSpace& space, const SpinManifoldParams& params,
                                     const TermFlags& flags);

double fluorescence(const PopulationState& state, const StateSpace& space,
                    const SpinManifoldParams& params, const TermFlags& flags);

// Manifold-weighted total: params0.weight * F0 + params1.weight * F1.
// Requires the two weights to sum to one (within 1e-12).
double total_fluorescence(const PopulationState& state0, const SpinManifoldParams& params0,
                          const PopulationState& state1, const SpinManifoldParams& params1,
                          const StateSpace& space, const TermFlags& flags);

} // namespace dicke
