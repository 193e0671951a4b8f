#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "bootperc/extremal.hpp"
#include "bootperc/rng.hpp"
#include "bootperc/stochastic.hpp"

using namespace bootperc;

namespace {

Site s2(Coord a, Coord b) { return Site({a, b}); }

SearchBudget serial_budget(bool symmetry = true) {
    SearchBudget budget;
    budget.symmetry_reduction = symmetry;
    budget.jobs = 1;
    return budget;
}

}  // namespace

TEST_SUITE_BEGIN("extremal");

TEST_CASE("canonical sets protect and singletons do not") {
    for (int d = 2; d <= 3; ++d) {
        for (int r = 2; r <= d; ++r) {
            for (int t = 0; t <= 3; ++t) {
                const auto set = canonical_set(CanonicalSpec::standard(d, r, t));
                CAPTURE(d);
                CAPTURE(r);
                CAPTURE(t);
                CHECK(protects_origin(set, d, Rule::standard(r), t));
            }
        }
    }
    CHECK(!protects_origin({origin_site(2)}, 2, Rule::standard(2), 1));
    CHECK(protects_origin({origin_site(2)}, 2, Rule::standard(2), 0));
    CHECK_THROWS_AS(protects_origin({s2(3, 0)}, 2, Rule::standard(2), 1), std::invalid_argument);
}

TEST_CASE("protection is monotone in the uninfected set") {
    CounterRng rng = CounterRng::for_stream(21, 0);
    const auto offsets = ball_offsets(2, 2);
    for (int it = 0; it < 400; ++it) {
        std::vector<Site> u, v;
        for (const Site& x : offsets) {
            const bool in_u = rng.bernoulli(0.5);
            if (in_u) u.push_back(x);
            if (in_u || rng.bernoulli(0.3)) v.push_back(x);
        }
        if (protects_origin(u, 2, Rule::standard(2), 2))
            CHECK(protects_origin(v, 2, Rule::standard(2), 2));
    }
}

TEST_CASE("window oracle agrees with the dynamics engine") {
    CounterRng rng = CounterRng::for_stream(22, 0);
    for (const int t : {1, 2}) {
        const auto win = Lattice::make_window(2, t);
        for (int it = 0; it < 300; ++it) {
            std::vector<Site> u = {origin_site(2)};
            for (std::int64_t i = 0; i < win->site_count(); ++i) {
                const Site x = win->site_at(i);
                if (x != origin_site(2) && rng.bernoulli(0.5)) u.push_back(x);
            }
            const Rule rule = rng.bernoulli(0.5) ? Rule::standard(2) : Rule::modified(2);
            const Configuration c = Configuration::from_uninfected(win, rule, u);
            const Trajectory traj = Trajectory::run(c, t);
            const bool engine_says =
                !traj.infected_at(t, win->index_of(origin_site(2)));
            CHECK(protects_origin(u, 2, rule, t) == engine_says);
        }
    }
}

TEST_CASE("minimal protecting sizes at small instances") {
    CHECK(min_protecting_size(2, Rule::standard(2), 0).size == 1);
    CHECK(min_protecting_size(2, Rule::standard(2), 1).size == 4);
    CHECK(min_protecting_size(2, Rule::standard(2), 2).size == 8);
    CHECK(min_protecting_size(3, Rule::standard(2), 1).size == 6);
    CHECK(min_protecting_size(2, Rule::modified(2), 1).size == 3);
    CHECK(min_protecting_size(2, Rule::modified(2), 2).size == 5);

    const auto res = min_protecting_size(2, Rule::standard(2), 2);
    CHECK(protects_origin(res.witness, 2, Rule::standard(2), 2));
    CHECK(res.witness.size() == 8);
    CHECK(std::find(res.witness.begin(), res.witness.end(), origin_site(2)) != res.witness.end());
}

TEST_CASE("census at d=2, r=2, t=2 matches the semi-canonical enumeration") {
    const CensusResult census = census_by_excess(2, Rule::standard(2), 2, 1, serial_budget());
    CHECK(census.min_size == 8);
    REQUIRE(census.entries.size() == 2);
    CHECK(census.entries[0].count == 16);
    CHECK(census.entries[0].witnesses_complete);
    CHECK(census.entries[0].witnesses.size() == 16);

    const SemiCanonicalMatch match = census_matches_semi_canonical(2, 2, 2, census);
    CHECK(match.matched);
    CHECK(match.census_count == 16);
    CHECK(match.enumeration_count == 16);
    CHECK(match.census_only.empty());
    CHECK(match.enumeration_only.empty());

    // every k=0 witness contains the origin and is exactly minimal per sphere
    for (const auto& witness : census.entries[0].witnesses) {
        CHECK(std::find(witness.begin(), witness.end(), origin_site(2)) != witness.end());
        CHECK(per_sphere_minimality(witness, 2, 2, 2));
    }

    // excess-1 growth stays far below the trivial binomial bound
    const Count trivial_bound = binomial(12, 8);
    MESSAGE("census (2,2,2) k=1 count: ", census.entries[1].count, " (trivial bound ",
            trivial_bound, ")");
    CHECK(census.entries[1].count > 0);
    CHECK(census.entries[1].count < trivial_bound);

    // excess-1 witnesses exceed the minimal layer profile in at most one
    // sphere, and there by exactly one site
    for (const auto& witness : census.entries[1].witnesses) {
        const auto profile = protected_sphere_profile(witness, 2, Rule::standard(2), 2);
        Count overshoot = 0;
        int layers_over = 0;
        for (int k = 0; k <= 2; ++k) {
            const Count bound = sphere_protecting_count(2, 2, k);
            REQUIRE(profile[static_cast<std::size_t>(k)] >= bound);
            if (profile[static_cast<std::size_t>(k)] > bound) {
                ++layers_over;
                overshoot += profile[static_cast<std::size_t>(k)] - bound;
            }
        }
        CHECK(layers_over <= 1);
        CHECK(overshoot <= 1);
    }
}

TEST_CASE("census agrees with unpruned full enumeration") {
    // Independent route: enumerate every subset of the window containing the
    // origin and classify it with protects_origin, with no search machinery.
    for (const auto& [rule, t] :
         {std::pair{Rule::standard(2), 2}, {Rule::modified(2), 2}, {Rule::standard(3), 2},
          {Rule::standard(4), 1}}) {
        const auto win = Lattice::make_window(2, t);
        const int n = static_cast<int>(win->site_count());
        std::vector<Site> sites;
        for (int i = 0; i < n; ++i) sites.push_back(win->site_at(i));
        std::map<int, Count> by_size;
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            std::vector<Site> u;
            for (int i = 0; i < n; ++i) {
                if (mask >> i & 1) u.push_back(sites[static_cast<std::size_t>(i)]);
            }
            if (protects_origin(u, 2, rule, t)) ++by_size[static_cast<int>(u.size())];
        }
        REQUIRE(!by_size.empty());
        const int ex = by_size.begin()->first;
        const CensusResult census =
            census_by_excess(2, rule, t, n - ex, serial_budget());
        CAPTURE(rule.r);
        CAPTURE(static_cast<int>(rule.kind));
        CHECK(census.min_size == ex);
        for (const CensusEntry& entry : census.entries) {
            const auto it = by_size.find(census.min_size + entry.excess);
            const Count expected = it == by_size.end() ? 0 : it->second;
            CAPTURE(entry.excess);
            CHECK(entry.count == expected);
        }
    }
}

TEST_CASE("symmetry-reduced and unreduced censuses agree") {
    for (const Rule rule : {Rule::standard(2), Rule::modified(2)}) {
        const CensusResult reduced = census_by_excess(2, rule, 2, 1, serial_budget(true));
        const CensusResult plain = census_by_excess(2, rule, 2, 1, serial_budget(false));
        REQUIRE(reduced.entries.size() == plain.entries.size());
        for (std::size_t k = 0; k < reduced.entries.size(); ++k) {
            CHECK(reduced.entries[k].count == plain.entries[k].count);
            CHECK(reduced.entries[k].witnesses == plain.entries[k].witnesses);
        }
    }
}

TEST_CASE("parallel census totals are byte-identical") {
    SearchBudget two = serial_budget();
    two.jobs = 2;
    const CensusResult a = census_by_excess(2, Rule::standard(2), 2, 2, serial_budget());
    const CensusResult b = census_by_excess(2, Rule::standard(2), 2, 2, two);
    REQUIRE(a.entries.size() == b.entries.size());
    CHECK(a.min_size == b.min_size);
    CHECK(a.nodes_visited == b.nodes_visited);
    for (std::size_t k = 0; k < a.entries.size(); ++k) {
        CHECK(a.entries[k].count == b.entries[k].count);
        CHECK(a.entries[k].witnesses == b.entries[k].witnesses);
    }
}

TEST_CASE("modified census at d=2, r=2, t=2") {
    const CensusResult census = census_by_excess(2, Rule::modified(2), 2, 0, serial_budget());
    CHECK(census.min_size == 5);
    REQUIRE(!census.entries.empty());
    CHECK(census.entries[0].count == 2);
    const auto sets = enumerate_modified_minimal(2, 2, 2);
    const std::set<std::vector<Site>> expected(sets.begin(), sets.end());
    const std::set<std::vector<Site>> got(census.entries[0].witnesses.begin(),
                                          census.entries[0].witnesses.end());
    CHECK(got == expected);
}

TEST_CASE("stability of canonical and displaced witnesses") {
    const auto canon = canonical_set(CanonicalSpec::standard(2, 2, 3));
    CHECK(stability_prefix_check(canon, 2, 2, 3, 0));

    int displaced_seen = 0;
    for (const auto& scs : enumerate_semi_canonical(2, 2, 3)) {
        bool displaced = false;
        for (std::size_t i = 0; i < scs.extremes.size(); ++i) {
            int norm_one_axis = 0;
            for (int c = 0; c < 2; ++c) norm_one_axis += scs.extremes[i][c] != 0;
            if (norm_one_axis > 1) displaced = true;
        }
        if (!displaced) continue;
        ++displaced_seen;
        CHECK(stability_prefix_check(scs.sites, 2, 2, 3, 2));
    }
    CHECK(displaced_seen > 0);
}

TEST_CASE("all minimal witnesses at d=2, r=2, t=3 are canonical after two layers") {
    const CensusResult census = census_by_excess(2, Rule::standard(2), 3, 0, serial_budget());
    CHECK(census.min_size == 12);
    REQUIRE(!census.entries.empty());
    CHECK(census.entries[0].count == 16);
    REQUIRE(census.entries[0].witnesses_complete);
    CHECK(census_matches_semi_canonical(2, 2, 3, census).matched);
    for (const auto& witness : census.entries[0].witnesses) {
        CHECK(stability_prefix_check(witness, 2, 2, 3, 2));
        CHECK(per_sphere_minimality(witness, 2, 2, 3));
    }
}

TEST_CASE("excess-1 witnesses become canonical after a measured number of layers") {
    const CensusResult census = census_by_excess(2, Rule::standard(2), 2, 1, serial_budget());
    REQUIRE(census.entries.size() == 2);
    REQUIRE(census.entries[1].witnesses_complete);
    int worst_c = 0;
    for (const auto& witness : census.entries[1].witnesses) {
        int c = 0;
        while (c <= 2 && !stability_prefix_check(witness, 2, 2, 2, c)) ++c;
        REQUIRE(c <= 2);
        worst_c = std::max(worst_c, c);
    }
    MESSAGE("excess-1 witnesses at (2,2,2): all canonical within c = ", worst_c, " layers (",
            census.entries[1].count, " witnesses)");
}

TEST_CASE("subcritical layer bounds") {
    // corner block at d=2, r=3
    const std::vector<Site> block = {s2(0, 0), s2(0, 1), s2(1, 0), s2(1, 1)};
    for (const int t : {2, 3}) {
        CHECK(protects_origin(block, 2, Rule::standard(3), t));
        CHECK(subcritical_layer_bound(block, 2, 3, t));
    }
    // single site at r = 2d protects only to horizon 0
    CHECK(subcritical_layer_bound({origin_site(2)}, 2, 4, 0));
    CHECK(!protects_origin({origin_site(2)}, 2, Rule::standard(4), 1));
    CHECK(subcritical_layer_bound({origin_site(2), s2(1, 0)}, 2, 4, 1));
    CHECK_THROWS_AS(subcritical_layer_bound(block, 2, 2, 2), std::invalid_argument);

    // exhaustive scan: every witness at (d=2, r=3, t=2) obeys the bounds
    const CensusResult census = census_by_excess(2, Rule::standard(3), 2, 1, serial_budget());
    CHECK(census.min_size == min_protecting_count(2, 3, 2));
    for (const CensusEntry& entry : census.entries) {
        REQUIRE(entry.witnesses_complete);
        for (const auto& witness : entry.witnesses)
            CHECK(subcritical_layer_bound(witness, 2, 3, 2));
    }
}

TEST_CASE("budget exhaustion is an explicit error") {
    SearchBudget tiny = serial_budget();
    tiny.node_cap = 64;
    CHECK_THROWS_AS(census_by_excess(2, Rule::standard(2), 2, 0, tiny), BudgetExhausted);
    CHECK_THROWS_AS(min_protecting_size(4, Rule::standard(2), 3), BudgetExhausted);  // > 64 sites
}

TEST_CASE("census requires retained witnesses for the semi-canonical match") {
    SearchBudget no_witnesses = serial_budget();
    no_witnesses.witness_cap = 0;
    const CensusResult census = census_by_excess(2, Rule::standard(2), 2, 0, no_witnesses);
    CHECK(census.entries[0].count == 16);
    CHECK(!census.entries[0].witnesses_complete);
    CHECK_THROWS_AS(census_matches_semi_canonical(2, 2, 2, census), std::invalid_argument);
}

TEST_SUITE_END();
