#pragma once

#include <vector>

#include "bootperc/geometry.hpp"

namespace bootperc {

// Description of an extremal protecting set inside B_radius(center).
// Supercritical (r <= d): orientation I has size r-1 and the set is
// {y in B_t(x) : y_i - x_i in {0, eps_i} for all i in I}.
// Subcritical (d < r <= 2d): orientation I has size 2d-r+1 and the set is
// {y in B_t(x) : y_i - x_i in {0, eps_i} for i in I, y_i = x_i otherwise}.
struct CanonicalSpec {
    enum class Regime { Supercritical, Subcritical };

    int d = 0;
    int r = 0;
    int radius = 0;
    Regime regime = Regime::Supercritical;
    std::vector<int> orientation;  // 0-based coordinates, strictly increasing
    std::vector<int> signs;        // +1/-1 per orientation entry
    Site center;                   // window coordinates; defaults to the origin

    static CanonicalSpec standard(int d, int r, int radius);  // I = last r-1 coords, all +1
    void validate() const;
    std::vector<int> alignment() const;  // [d] \ I
};

std::vector<Site> canonical_set(const CanonicalSpec& spec);

// Every supercritical spec centred at the origin, all orientations and signs.
std::vector<CanonicalSpec> all_canonical_specs(int d, int r, int radius);

struct SemiCanonicalSet {
    CanonicalSpec base;
    std::vector<Site> extremes;  // chosen extreme site per (alignment coord, sign)
    std::vector<Site> sites;     // sorted
};

// All distinct semi-canonical sets centred at the origin. Each extreme-site
// choice set is generated from the replacement rule: keep the degree-1 site
// x, or swap it for any other neighbour of x's unique in-set neighbour that
// is not already in the set. Requires t >= 2 and 2 <= r <= d.
std::vector<SemiCanonicalSet> enumerate_semi_canonical(int d, int r, int t);

// Minimal sets for the modified rule: the (d-r+1)-dimensional l1 balls
// spanned by each choice of d-r+1 coordinates.
std::vector<std::vector<Site>> enumerate_modified_minimal(int d, int r, int t);

}  // namespace bootperc
