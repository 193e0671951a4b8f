#pragma once

#include <cstdint>

namespace bootperc {

// Exact count with checked arithmetic; overflow throws std::overflow_error
// instead of wrapping.
using Count = std::uint64_t;

Count checked_add(Count a, Count b);
Count checked_mul(Count a, Count b);
Count checked_pow(Count base, unsigned exp);
Count binomial(std::uint64_t n, std::uint64_t k);

// Generalized binomial with possibly negative upper argument:
// binom(n, k) = n(n-1)...(n-k+1) / k!. Needed by the identity checks,
// whose right-hand sides walk the upper argument below zero.
std::int64_t binomial_signed(std::int64_t n, std::int64_t k);

// sum_{i_1=0}^{limit} sum_{i_2=0}^{i_1} ... sum_{i_levels=0}^{i_{levels-1}} binom(top, i_levels),
// with levels = 0 meaning the bare binomial binom(top, limit) and a
// negative limit meaning an empty sum.
Count iterated_binom_sum(int levels, int top, int limit);
std::int64_t iterated_binom_sum_signed(int levels, std::int64_t top, int limit);

// Minimum number of uninfected sites in B_t needed to keep the origin
// uninfected through time t. Supercritical thresholds r <= d use the
// (d-r+2)-fold iterated sum; subcritical thresholds d < r <= 2d use
// sum_{k<=t} binom(2d-r+1, k), with t > 2d-r+1 rejected.
Count min_protecting_count(int d, int r, int t);

// Number of those sites at l1 distance exactly t (single layer). 2 <= r <= d.
Count sphere_protecting_count(int d, int r, int t);

// Same minimum under the modified rule: the volume of a (d-r+1)-dimensional
// l1 ball of radius t.
Count min_protecting_count_modified(int d, int r, int t);

// Number of minimal protecting arrangements (closed forms).
Count extremal_set_count(int d, int r);           // binom(d,d-r+1) * 2^(r-1) * d^(2(d-r+1))
Count extremal_set_count_modified(int d, int r);  // binom(d,d-r+1)

struct IdentityCheck {
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
    bool equal = false;
};

// Single-step layer identity: d >= r >= 2, f >= 0, k >= 0.
IdentityCheck identity_mini(int d, int r, int f, int k);

// Iterated variant: d > r >= 2, 0 <= f <= d, k >= 0. The telescoped
// right-hand side is evaluated with nested limits throughout.
IdentityCheck identity_mega(int d, int r, int f, int k);

}  // namespace bootperc
