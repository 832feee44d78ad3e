// oracle.hpp — Brute-force checks of the collective coefficients on explicit states

#pragma once

#include <cstdint>
#include <vector>

#include "dicke/half_int.hpp"

// Everything here expands symmetric collective states of n two-level
// emitters over the full 2^n computational basis and evaluates matrix
// elements by literally counting basis strings. No ladder formula from the
// rate-equation side is reused, so agreement between the two is evidence,
// not tautology. The expansion is exponential in n; the cap keeps it cheap.
namespace dicke::oracle {

inline constexpr int max_sites = 14;

// C(n, k) in exact 64-bit arithmetic; 0 when k is outside [0, n].
long long binomial(int n, int k);

// |J = n/2, M> written out over basis masks: bit j set means emitter j is
// excited. Every mask with popcount J + M appears with the same amplitude
// 1/sqrt(C), and amplitude^2 = 1/C is kept as an exact ratio.
struct BasisExpansion {
    int n_sites{0};
    int twice_m{0};
    std::vector<std::uint32_t> masks;  // ascending
    double amplitude{0.0};
    long long amplitude_sq_num{0};
    long long amplitude_sq_den{1};

    double norm_squared() const;  // sums amplitude^2 exactly, then divides once
};

BasisExpansion dicke_state(int n_sites, HalfInt m);

// <J,M| 2 s^z_site |J,M>, evaluated by counting how many basis strings have
// emitter `site` excited versus ground.
double phase_flip_amplitude(int n_sites, HalfInt m, int site);

// Overlaps of 2 s^z_site |J,M> with the two decoupled-emitter product
// states |e>_site (x) |J-1/2, M-1/2> and |g>_site (x) |J-1/2, M+1/2>.
// The weights are the squared overlaps, formed as exact integer ratios.
struct DecouplingOverlaps {
    double excited_overlap{0.0};  // >= 0
    double ground_overlap{0.0};   // <= 0: the phase flip puts a relative sign here
    double excited_weight{0.0};
    double ground_weight{0.0};
};

DecouplingOverlaps decoupling_overlaps(int n_sites, HalfInt m, int site);

// |<J, M-1| sum_j |g><e|_j |J, M>|^2 with the lowering operator applied
// string by string. Requires M - 1 >= -J.
double lowering_weight(int n_sites, HalfInt m);

} // namespace dicke::oracle
