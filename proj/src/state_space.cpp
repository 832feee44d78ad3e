// state_space.cpp — Collective ladder enumeration and population-vector plumbing

#include "dicke/state_space.hpp"

#include <stdexcept>
#include <string>

namespace dicke {

const char* manifold_name(Manifold m) {
    return m == Manifold::sigma0 ? "sigma0" : "sigma_pm1";
}

bool is_valid_index(const DickeIndex& idx) {
    const int tj = idx.j.twice;
    const int tm = idx.m.twice;
    if (tj < 1) return false;
    if (tm < -tj || tm > tj) return false;
    // 2j and 2m must share parity so that j - m is a whole number.
    return (tj - tm) % 2 == 0;
}

long StateSpace::pack(const DickeIndex& idx) {
    // Both components fit comfortably in 16 bits for any supported n.
    return static_cast<long>(idx.j.twice) * 65536L + static_cast<long>(idx.m.twice + 32768);
}

bool StateSpace::contains(const DickeIndex& idx) const {
    return slot_of_.count(pack(idx)) != 0;
}

std::size_t StateSpace::slot(const DickeIndex& idx) const {
    auto it = slot_of_.find(pack(idx));
    if (it == slot_of_.end()) {
        throw std::out_of_range("StateSpace::slot: index (2j=" + std::to_string(idx.j.twice) +
                                ", 2m=" + std::to_string(idx.m.twice) +
                                ") is not part of this space");
    }
    return it->second;
}

StateSpace build_state_space(int n_emitters, int max_emitters) {
    if (n_emitters < 1 || n_emitters > max_emitters) {
        throw std::invalid_argument("build_state_space: n_emitters must lie in [1, " +
                                    std::to_string(max_emitters) + "], got " +
                                    std::to_string(n_emitters));
    }

    StateSpace space;
    space.n_ = n_emitters;
    space.indices_.reserve(static_cast<std::size_t>(n_emitters) * (n_emitters + 3) / 2);

    for (int tj = n_emitters; tj >= 1; --tj) {
        for (int tm = tj; tm >= -tj; tm -= 2) {
            DickeIndex idx{HalfInt::from_twice(tj), HalfInt::from_twice(tm)};
            space.slot_of_.emplace(StateSpace::pack(idx), space.indices_.size());
            space.indices_.push_back(idx);
        }
    }
    return space;
}

Eigen::VectorXd PopulationState::to_raw() const {
    Eigen::VectorXd raw(p.size() + 1);
    raw.head(p.size()) = p;
    raw(p.size()) = n_nc;
    return raw;
}

PopulationState PopulationState::from_raw(const StateSpace& space, Manifold sigma, double t,
                                          const Eigen::VectorXd& raw) {
    if (raw.size() != static_cast<Eigen::Index>(space.size()) + 1) {
        throw std::invalid_argument("PopulationState::from_raw: raw vector has " +
                                    std::to_string(raw.size()) + " entries, expected " +
                                    std::to_string(space.size() + 1));
    }
    PopulationState s;
    s.sigma = sigma;
    s.t = t;
    s.p = raw.head(raw.size() - 1);
    s.n_nc = raw(raw.size() - 1);
    return s;
}

PopulationState initial_state(const StateSpace& space, Manifold sigma) {
    PopulationState s;
    s.sigma = sigma;
    s.t = 0.0;
    s.p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    s.n_nc = 0.0;

    const int n = space.n_emitters();
    const double weight = 1.0 / (n + 1);
    for (int tm = n; tm >= -n; tm -= 2) {
        DickeIndex idx{HalfInt::from_twice(n), HalfInt::from_twice(tm)};
        s.p(static_cast<Eigen::Index>(space.slot(idx))) = weight;
    }
    return s;
}

} // namespace dicke
