// oracle.cpp — Enumeration of collective states over the computational basis

#include "dicke/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace dicke::oracle {

namespace {

// Number of excited emitters in |J = n/2, M>: k = J + M.
int excitation_count(int n_sites, HalfInt m) {
    if (n_sites < 1 || n_sites > max_sites) {
        throw std::invalid_argument("oracle: n_sites must lie in [1, " +
                                    std::to_string(max_sites) + "], got " +
                                    std::to_string(n_sites));
    }
    if ((n_sites - m.twice) % 2 != 0 || m.twice < -n_sites || m.twice > n_sites) {
        throw std::invalid_argument("oracle: 2m = " + std::to_string(m.twice) +
                                    " is not a projection of n = " + std::to_string(n_sites) +
                                    " emitters");
    }
    return (n_sites + m.twice) / 2;
}

void check_site(int n_sites, int site) {
    if (site < 0 || site >= n_sites) {
        throw std::invalid_argument("oracle: site " + std::to_string(site) +
                                    " out of range for " + std::to_string(n_sites) +
                                    " emitters");
    }
}

} // namespace

long long binomial(int n, int k) {
    if (n < 0 || n > 62) {
        throw std::invalid_argument("binomial: n must lie in [0, 62]");
    }
    if (k < 0 || k > n) return 0;
    // Pascal's rule keeps every intermediate value exact.
    std::vector<long long> row(static_cast<std::size_t>(n) + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = i; j >= 1; --j) row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j - 1)];
    }
    return row[static_cast<std::size_t>(k)];
}

double BasisExpansion::norm_squared() const {
    // masks.size() * (num/den) with the product formed in integers first.
    const long long total = static_cast<long long>(masks.size()) * amplitude_sq_num;
    return static_cast<double>(total) / static_cast<double>(amplitude_sq_den);
}

BasisExpansion dicke_state(int n_sites, HalfInt m) {
    const int k = excitation_count(n_sites, m);
    const long long c = binomial(n_sites, k);

    BasisExpansion state;
    state.n_sites = n_sites;
    state.twice_m = m.twice;
    state.amplitude = 1.0 / std::sqrt(static_cast<double>(c));
    state.amplitude_sq_num = 1;
    state.amplitude_sq_den = c;
    state.masks.reserve(static_cast<std::size_t>(c));
    const std::uint32_t end = std::uint32_t{1} << n_sites;
    for (std::uint32_t mask = 0; mask < end; ++mask) {
        if (std::popcount(mask) == k) state.masks.push_back(mask);
    }
    return state;
}

double phase_flip_amplitude(int n_sites, HalfInt m, int site) {
    check_site(n_sites, site);
    const BasisExpansion state = dicke_state(n_sites, m);

    long long signed_count = 0;
    const std::uint32_t bit = std::uint32_t{1} << site;
    for (std::uint32_t mask : state.masks) {
        signed_count += (mask & bit) ? +1 : -1;
    }
    // Each string contributes amplitude^2 = 1/C times its sign.
    return static_cast<double>(signed_count) / static_cast<double>(state.amplitude_sq_den);
}

DecouplingOverlaps decoupling_overlaps(int n_sites, HalfInt m, int site) {
    check_site(n_sites, site);
    if (n_sites < 2) {
        throw std::invalid_argument("decoupling_overlaps: need at least 2 emitters");
    }
    const int k = excitation_count(n_sites, m);
    const BasisExpansion state = dicke_state(n_sites, m);

    // 2 s^z_site flips the sign of every string with `site` in the ground
    // state. Split the flipped state by the state of `site`; the remaining
    // n-1 emitters then form the two reduced collective states.
    long long excited_count = 0;
    long long ground_count = 0;
    const std::uint32_t bit = std::uint32_t{1} << site;
    for (std::uint32_t mask : state.masks) {
        if (mask & bit) ++excited_count;
        else ++ground_count;
    }

    const long long c = state.amplitude_sq_den;
    DecouplingOverlaps out;
    if (excited_count > 0) {
        const long long c_reduced = binomial(n_sites - 1, k - 1);
        out.excited_weight = static_cast<double>(excited_count * excited_count) /
                             static_cast<double>(c * c_reduced);
        out.excited_overlap = std::sqrt(out.excited_weight);
    }
    if (ground_count > 0) {
        const long long c_reduced = binomial(n_sites - 1, k);
        out.ground_weight = static_cast<double>(ground_count * ground_count) /
                            static_cast<double>(c * c_reduced);
        out.ground_overlap = -std::sqrt(out.ground_weight);
    }
    return out;
}

double lowering_weight(int n_sites, HalfInt m) {
    const int k = excitation_count(n_sites, m);
    if (k < 1) {
        throw std::invalid_argument("lowering_weight: |J, -J> has no lower rung");
    }
    const BasisExpansion state = dicke_state(n_sites, m);

    // Apply sum_j |g><e|_j string by string and tally the multiplicity of
    // every child string.
    std::unordered_map<std::uint32_t, long long> children;
    for (std::uint32_t mask : state.masks) {
        std::uint32_t rest = mask;
        while (rest != 0) {
            const std::uint32_t bit = rest & (~rest + 1);
            children[mask ^ bit] += 1;
            rest ^= bit;
        }
    }

    long long overlap_count = 0;  // sum of multiplicities, every child has popcount k-1
    for (const auto& [child, mult] : children) {
        if (std::popcount(child) != k - 1) {
            throw std::logic_error("lowering_weight: child string with unexpected excitation");
        }
        overlap_count += mult;
    }

    const long long c_from = binomial(n_sites, k);
    const long long c_to = binomial(n_sites, k - 1);
    return static_cast<double>(overlap_count * overlap_count) /
           static_cast<double>(c_from * c_to);
}

} // namespace dicke::oracle
