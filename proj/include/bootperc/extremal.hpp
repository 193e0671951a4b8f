#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bootperc/canonical.hpp"
#include "bootperc/counts.hpp"
#include "bootperc/dynamics.hpp"
#include "bootperc/geometry.hpp"

namespace bootperc {

struct BudgetExhausted : std::runtime_error {
    explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct SearchBudget {
    std::optional<int> max_subset_size;
    bool symmetry_reduction = true;
    int jobs = 1;
    std::uint64_t node_cap = 4'000'000'000ULL;
    std::size_t witness_cap = 10'000;
};

// True iff the origin is still uninfected at time t when the initially
// uninfected sites are exactly U inside the window B_t and every other
// site (including the exterior) is infected. By monotonicity this is the
// "no matter what the other states are" criterion.
bool protects_origin(const std::vector<Site>& uninfected, int d, Rule rule, int t);

struct MinSearchResult {
    int size = 0;
    std::vector<Site> witness;
    std::uint64_t nodes_visited = 0;
};

// Exact minimum size of a protecting subset of B_t, by increasing-size
// exhaustive search over subsets containing the origin.
MinSearchResult min_protecting_size(int d, Rule rule, int t, const SearchBudget& budget = {});

struct CensusEntry {
    int excess = 0;
    Count count = 0;
    std::vector<std::vector<Site>> witnesses;  // retained while count <= witness_cap
    bool witnesses_complete = true;
};

struct CensusResult {
    int d = 0;
    Rule rule;
    int t = 0;
    int min_size = 0;
    std::vector<CensusEntry> entries;
    std::uint64_t nodes_visited = 0;
    double runtime_ms = 0.0;
};

// Exact number of protecting subsets of B_t of size min_size + k for each
// k <= k_max (k_max is clamped to |B_t| - min_size). Counts are over
// unreduced sets whether or not symmetry reduction is enabled.
CensusResult census_by_excess(int d, Rule rule, int t, int k_max, const SearchBudget& budget = {});

struct SemiCanonicalMatch {
    bool matched = false;
    Count census_count = 0;
    Count enumeration_count = 0;
    std::vector<std::vector<Site>> census_only;
    std::vector<std::vector<Site>> enumeration_only;
};

// Set-equality between the census k=0 witness list and the semi-canonical
// enumeration. Requires complete witnesses in the census.
SemiCanonicalMatch census_matches_semi_canonical(int d, int r, int t, const CensusResult& census);

// |P(S_k)| for k = 0..t of the run seeded by the witness.
std::vector<Count> protected_sphere_profile(const std::vector<Site>& witness, int d, Rule rule,
                                            int t);

// Per-sphere protected counts of a protecting witness. Lower bounds
// |P(S_k)| >= sphere_protecting_count(d,r,k) are asserted (a violation
// throws); returns whether every layer is exactly minimal.
bool per_sphere_minimality(const std::vector<Site>& witness, int d, int r, int t);

// True iff the protected sites of the witness within B_{t-c} form exactly
// a canonical set (matched against every orientation/sign choice).
bool stability_prefix_check(const std::vector<Site>& witness, int d, int r, int t, int c);

// Subcritical layer bounds |P(S_k)| >= binom(2d-r+1, k) and their ball
// sums, for d+1 <= r <= 2d.
bool subcritical_layer_bound(const std::vector<Site>& witness, int d, int r, int t);

}  // namespace bootperc
