// test_dicke_space.cpp — Ladder enumeration and population-vector invariants

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "dicke/state_space.hpp"

using namespace dicke;

TEST_CASE("half-integers stay exact") {
    const HalfInt j = HalfInt::from_twice(7);  // 7/2
    CHECK(j.value() == doctest::Approx(3.5));
    CHECK(!j.is_whole());
    CHECK(HalfInt::whole(3).twice == 6);
    CHECK((j + one_half).twice == 8);
    CHECK((j - one_half).twice == 6);
    CHECK((-j).twice == -7);
    CHECK(HalfInt::from_twice(4) > HalfInt::from_twice(3));
}

TEST_CASE("index validity") {
    CHECK(is_valid_index({HalfInt::from_twice(1), HalfInt::from_twice(-1)}));
    CHECK(is_valid_index({HalfInt::from_twice(4), HalfInt::from_twice(0)}));
    // j = 0 is not tracked.
    CHECK(!is_valid_index({HalfInt::from_twice(0), HalfInt::from_twice(0)}));
    // |m| <= j.
    CHECK(!is_valid_index({HalfInt::from_twice(2), HalfInt::from_twice(4)}));
    // 2j and 2m must share parity.
    CHECK(!is_valid_index({HalfInt::from_twice(2), HalfInt::from_twice(1)}));
}

TEST_CASE("slot count is n(n+3)/2") {
    CHECK(build_state_space(1).size() == 2);
    CHECK(build_state_space(7).size() == 35);
    CHECK(build_state_space(10).size() == 65);
    for (int n = 1; n <= 20; ++n) {
        CHECK(build_state_space(n).size() ==
              static_cast<std::size_t>(n) * (n + 3) / 2);
    }
}

TEST_CASE("emitter count bounds") {
    CHECK_THROWS_AS(build_state_space(0), std::invalid_argument);
    CHECK_THROWS_AS(build_state_space(-3), std::invalid_argument);
    CHECK_THROWS_AS(build_state_space(65), std::invalid_argument);
    CHECK(build_state_space(64).size() == 64u * 67 / 2);
}

TEST_CASE("ordering is descending j, then descending m") {
    const StateSpace space = build_state_space(3);
    const auto& idx = space.indices();
    REQUIRE(idx.size() == 9);
    // j = 3/2 ladder first, top rung first.
    CHECK(idx[0] == DickeIndex{HalfInt::from_twice(3), HalfInt::from_twice(3)});
    CHECK(idx[1] == DickeIndex{HalfInt::from_twice(3), HalfInt::from_twice(1)});
    CHECK(idx[2] == DickeIndex{HalfInt::from_twice(3), HalfInt::from_twice(-1)});
    CHECK(idx[3] == DickeIndex{HalfInt::from_twice(3), HalfInt::from_twice(-3)});
    // then the whole-spin ladder j = 1,
    CHECK(idx[4] == DickeIndex{HalfInt::from_twice(2), HalfInt::from_twice(2)});
    CHECK(idx[5] == DickeIndex{HalfInt::from_twice(2), HalfInt::from_twice(0)});
    CHECK(idx[6] == DickeIndex{HalfInt::from_twice(2), HalfInt::from_twice(-2)});
    // and finally j = 1/2. j = 0 never appears.
    CHECK(idx[7] == DickeIndex{HalfInt::from_twice(1), HalfInt::from_twice(1)});
    CHECK(idx[8] == DickeIndex{HalfInt::from_twice(1), HalfInt::from_twice(-1)});
}

TEST_CASE("slot lookup is the inverse of enumeration") {
    const StateSpace space = build_state_space(12);
    for (std::size_t s = 0; s < space.size(); ++s) {
        CHECK(space.slot(space.index(s)) == s);
        CHECK(space.contains(space.index(s)));
    }
    CHECK(!space.contains({HalfInt::from_twice(13), HalfInt::from_twice(1)}));
    CHECK(!space.contains({HalfInt::from_twice(0), HalfInt::from_twice(0)}));
    CHECK_THROWS_AS(space.slot({HalfInt::from_twice(13), HalfInt::from_twice(1)}),
                    std::out_of_range);
}

TEST_CASE("every valid index within range appears exactly once") {
    const StateSpace space = build_state_space(9);
    std::set<std::pair<int, int>> seen;
    for (const DickeIndex& idx : space.indices()) {
        CHECK(is_valid_index(idx));
        CHECK(idx.j.twice <= 9);
        CHECK(seen.insert({idx.j.twice, idx.m.twice}).second);
    }
}

TEST_CASE("initial state spreads evenly over the top ladder") {
    for (int n : {1, 2, 7, 10}) {
        const StateSpace space = build_state_space(n);
        const PopulationState s = initial_state(space, Manifold::sigma_pm1);
        CHECK(s.sigma == Manifold::sigma_pm1);
        CHECK(s.t == 0.0);
        CHECK(s.n_nc == 0.0);

        double sum = 0.0;
        for (std::size_t k = 0; k < space.size(); ++k) {
            const DickeIndex idx = space.index(k);
            const double p = s.p(static_cast<Eigen::Index>(k));
            if (idx.j.twice == n) {
                CHECK(p == doctest::Approx(1.0 / (n + 1)).epsilon(1e-14));
            } else {
                CHECK(p == 0.0);
            }
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("raw layout round-trips") {
    const StateSpace space = build_state_space(4);
    PopulationState s = initial_state(space, Manifold::sigma0);
    s.n_nc = 0.75;
    s.t = 3.5;

    const Eigen::VectorXd raw = s.to_raw();
    REQUIRE(raw.size() == static_cast<Eigen::Index>(space.size()) + 1);
    CHECK(raw(raw.size() - 1) == 0.75);

    const PopulationState back = PopulationState::from_raw(space, s.sigma, s.t, raw);
    CHECK(back.n_nc == s.n_nc);
    CHECK(back.t == s.t);
    CHECK((back.p - s.p).norm() == 0.0);

    CHECK_THROWS_AS(PopulationState::from_raw(space, s.sigma, 0.0, Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
}
