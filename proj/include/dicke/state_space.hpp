// state_space.hpp — Enumeration of the collective (J, M) ladder and population vectors

#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "dicke/half_int.hpp"

namespace dicke {

// Ground-state spin projection an emitter is pumped into.
enum class Manifold { sigma0, sigma_pm1 };

const char* manifold_name(Manifold m);

// One rung of the collective ladder. A valid index has j >= 1/2, |m| <= j,
// and 2j, 2m of equal parity (so j - m is a whole number).
struct DickeIndex {
    HalfInt j;
    HalfInt m;

    friend constexpr bool operator==(const DickeIndex&, const DickeIndex&) = default;
};

bool is_valid_index(const DickeIndex& idx);

// Complete index set for n emitters: every j from n/2 down to 1/2 in steps
// of 1/2 — integer and half-integer ladders both — with m = j, j-1, ..., -j.
// j = 0 carries no population dynamics we track; flux into it simply leaves
// the space. Slot order is descending j, then descending m within a ladder,
// which gives n(n+3)/2 slots in total.
class StateSpace {
public:
    StateSpace() = default;

    int n_emitters() const { return n_; }
    std::size_t size() const { return indices_.size(); }
    const std::vector<DickeIndex>& indices() const { return indices_; }
    const DickeIndex& index(std::size_t slot) const { return indices_.at(slot); }

    bool contains(const DickeIndex& idx) const;
    std::size_t slot(const DickeIndex& idx) const;  // throws std::out_of_range if absent

private:
    friend StateSpace build_state_space(int n_emitters, int max_emitters);

    static long pack(const DickeIndex& idx);

    int n_{0};
    std::vector<DickeIndex> indices_;
    std::unordered_map<long, std::size_t> slot_of_;
};

// Builds the ladder enumeration for n_emitters in [1, max_emitters].
StateSpace build_state_space(int n_emitters, int max_emitters = 64);

// Populations of every ladder slot plus the decoupled-emitter count n_nc.
// Entries are occupation probabilities; n_nc is the expected number of
// emitters that radiate independently after losing phase with the rest.
struct PopulationState {
    Manifold sigma{Manifold::sigma0};
    double t{0.0};          // ns
    Eigen::VectorXd p;      // one entry per ladder slot
    double n_nc{0.0};

    // Raw layout used by the integrator: [p(0), ..., p(size-1), n_nc].
    Eigen::VectorXd to_raw() const;
    static PopulationState from_raw(const StateSpace& space, Manifold sigma, double t,
                                    const Eigen::VectorXd& raw);
};

// State right after a strong off-resonant pulse: each of the n+1 rungs of
// the fully symmetric ladder j = n/2 holds probability 1/(n+1), every other
// slot and the decoupled pool start empty.
PopulationState initial_state(const StateSpace& space, Manifold sigma);

} // namespace dicke
