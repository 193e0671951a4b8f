#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "bootperc/geometry.hpp"
#include "bootperc/rng.hpp"

using namespace bootperc;

namespace {

Site s2(Coord a, Coord b) { return Site({a, b}); }

// Scan oracle for ball sizes: walk the full cube and filter by norm.
long scan_ball_size(int d, int r) {
    long count = 0;
    std::vector<Coord> x(static_cast<std::size_t>(d), -r);
    while (true) {
        int norm = 0;
        for (const Coord v : x) norm += std::abs(v);
        if (norm <= r) ++count;
        int i = 0;
        while (i < d && ++x[static_cast<std::size_t>(i)] > r) {
            x[static_cast<std::size_t>(i)] = -r;
            ++i;
        }
        if (i == d) break;
    }
    return count;
}

Site random_window_site(CounterRng& rng, int d, int t) {
    // rejection sample from the cube
    while (true) {
        Site x = origin_site(d);
        int norm = 0;
        for (int i = 0; i < d; ++i) {
            x[i] = static_cast<Coord>(rng.next_below(static_cast<std::uint64_t>(2 * t + 1))) - t;
            norm += std::abs(x[i]);
        }
        if (norm <= t) return x;
    }
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("l1 norms on windows and tori") {
    const auto win = Lattice::make_window(2, 4);
    CHECK(win->l1_norm(origin_site(2)) == 0);
    CHECK(win->l1_norm(s2(1, -2)) == 3);

    const auto torus = Lattice::make_torus(2, 5);
    CHECK(torus->l1_norm(s2(4, 0)) == 1);  // wraps: min(4, 5-4)
    CHECK(torus->l1_norm(s2(2, 3)) == 4);
    CHECK(torus->distance(s2(4, 4), s2(0, 0)) == 2);
}

TEST_CASE("ball sizes match the scan oracle") {
    CHECK(ball_size(2, 1) == 5);
    CHECK(ball_size(3, 2) == 25);
    CHECK(ball_size(2, 2) == 13);
    for (int d = 1; d <= 3; ++d) {
        for (int r = 0; r <= 4; ++r) {
            CAPTURE(d);
            CAPTURE(r);
            CHECK(ball_size(d, r) == scan_ball_size(d, r));
        }
    }
}

TEST_CASE("ball minus smaller ball equals sphere for d <= 6, r <= 8") {
    for (int d = 1; d <= 6; ++d) {
        const auto win = Lattice::make_window(d, 8);
        for (int r = 1; r <= 8; ++r) {
            CAPTURE(d);
            CAPTURE(r);
            const auto sphere = sphere_sites(*win, origin_site(d), r);
            CHECK(ball_size(d, r) - ball_size(d, r - 1) ==
                  static_cast<std::int64_t>(sphere.size()));
        }
    }
}

TEST_CASE("torus balls that would wrap are rejected") {
    const auto torus = Lattice::make_torus(2, 5);
    CHECK(ball_sites(*torus, origin_site(2), 2).size() == 13);
    CHECK_THROWS_AS(ball_sites(*torus, origin_site(2), 3), std::invalid_argument);
}

TEST_CASE("neighbours on the torus") {
    const auto torus = Lattice::make_torus(2, 5);
    const auto nbrs = torus->neighbours(origin_site(2));
    REQUIRE(nbrs.size() == 4);
    std::set<Site> got;
    for (const auto& nb : nbrs) {
        CHECK(!nb.exterior);
        got.insert(nb.site);
    }
    CHECK(got == std::set<Site>{s2(1, 0), s2(4, 0), s2(0, 1), s2(0, 4)});
}

TEST_CASE("window neighbours carry exterior flags") {
    const auto win = Lattice::make_window(2, 1);
    const auto nbrs = win->neighbours(s2(1, 0));
    REQUIRE(nbrs.size() == 4);
    for (const auto& nb : nbrs) {
        if (nb.site == s2(0, 0)) {
            CHECK(!nb.exterior);
        } else {
            CAPTURE(nb.site.coords);
            CHECK(nb.exterior);
        }
    }
}

TEST_CASE("neighbour multiset is closed under mirroring through the site") {
    CounterRng rng = CounterRng::for_stream(101, 0);
    const auto torus = Lattice::make_torus(3, 7);
    for (int it = 0; it < 200; ++it) {
        Site x = origin_site(3);
        for (int i = 0; i < 3; ++i) x[i] = static_cast<Coord>(rng.next_below(7));
        std::set<Site> nbrs;
        for (const auto& nb : torus->neighbours(x)) nbrs.insert(nb.site);
        for (const Site& y : nbrs) {
            Site mirror = x;
            for (int i = 0; i < 3; ++i) mirror[i] = ((2 * x[i] - y[i]) % 7 + 7) % 7;
            CHECK(nbrs.count(mirror) == 1);
        }
    }
}

TEST_CASE("torus adjacency is an involution") {
    CounterRng rng = CounterRng::for_stream(102, 0);
    const auto torus = Lattice::make_torus(2, 6);
    for (int it = 0; it < 200; ++it) {
        Site x = origin_site(2);
        for (int i = 0; i < 2; ++i) x[i] = static_cast<Coord>(rng.next_below(6));
        for (const auto& nb : torus->neighbours(x)) {
            bool back = false;
            for (const auto& nb2 : torus->neighbours(nb.site)) back |= nb2.site == x;
            CHECK(back);
        }
    }
}

TEST_CASE("is_above examples") {
    CHECK(is_above(s2(1, 0), s2(2, 5)));
    CHECK(!is_above(s2(1, -1), s2(1, 0)));
    CHECK(is_above(s2(0, 0), s2(-3, 7)));
}

TEST_CASE("is_above is a partial order") {
    CounterRng rng = CounterRng::for_stream(103, 0);
    for (int it = 0; it < 1000; ++it) {
        const Site x = random_window_site(rng, 3, 4);
        const Site y = random_window_site(rng, 3, 4);
        const Site z = random_window_site(rng, 3, 4);
        CHECK(is_above(x, x));
        if (is_above(x, y) && is_above(y, x)) CHECK(x == y);
        if (is_above(x, y) && is_above(y, z)) CHECK(is_above(x, z));
    }
}

TEST_CASE("is_compatible examples and oracle filter") {
    const CompatibilityFunction all_free = CompatibilityFunction::all_free(2);
    CounterRng rng = CounterRng::for_stream(104, 0);
    for (int it = 0; it < 50; ++it) {
        CHECK(is_compatible(random_window_site(rng, 2, 3), random_window_site(rng, 2, 3), all_free));
    }

    CompatibilityFunction fixed0 = all_free;
    fixed0.tags[0] = CompatTag::Fixed;
    CHECK(!is_compatible(s2(0, 0), s2(1, 0), fixed0));

    CompatibilityFunction pm = all_free;
    pm.tags[0] = CompatTag::Pos;
    pm.tags[1] = CompatTag::Neg;
    CHECK(is_compatible(s2(0, 0), s2(3, -2), pm));

    // direct filter oracle over a window
    for (int it = 0; it < 100; ++it) {
        CompatibilityFunction c = all_free;
        for (int i = 0; i < 2; ++i) {
            const auto roll = rng.next_below(4);
            c.tags[static_cast<std::size_t>(i)] =
                roll == 0 ? CompatTag::Neg
                          : (roll == 1 ? CompatTag::Fixed : (roll == 2 ? CompatTag::Pos : CompatTag::Free));
        }
        const Site x = random_window_site(rng, 2, 2);
        for (const Site& y : ball_offsets(2, 3)) {
            bool oracle = true;
            for (int i = 0; i < 2; ++i) {
                if (c(i) == CompatTag::Pos && y[i] - x[i] < 0) oracle = false;
                if (c(i) == CompatTag::Neg && y[i] - x[i] > 0) oracle = false;
                if (c(i) == CompatTag::Fixed && y[i] != x[i]) oracle = false;
            }
            CHECK(is_compatible(x, y, c) == oracle);
        }
    }
}

TEST_CASE("restrict_coord fixes one coordinate and is idempotent") {
    const CompatibilityFunction c = CompatibilityFunction::all_free(3);
    const CompatibilityFunction r0 = restrict_coord(c, 0);
    CHECK(r0.tags[0] == CompatTag::Fixed);
    CHECK(r0.tags[1] == CompatTag::Free);
    CHECK(restrict_coord(r0, 0) == r0);
    CHECK(restrict_coord(restrict_coord(c, 0), 1) == restrict_coord(restrict_coord(c, 1), 0));
    CHECK(r0.fixed() == std::vector<int>{0});
    CHECK(r0.free_coords() == std::vector<int>{1, 2});
}

TEST_CASE("lattice invariants") {
    CHECK_THROWS_AS(Lattice::make_torus(2, 2), std::invalid_argument);
    const auto win = Lattice::make_window(3, 2);
    CHECK(win->site_count() == ball_size(3, 2));
    CHECK(win->neighbours(origin_site(3)).size() == 6);

    // index round trip
    CounterRng rng = CounterRng::for_stream(105, 0);
    const auto torus = Lattice::make_torus(3, 5);
    for (int it = 0; it < 100; ++it) {
        const auto idx = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(torus->site_count())));
        CHECK(torus->index_of(torus->site_at(idx)) == idx);
    }
    for (int it = 0; it < 100; ++it) {
        const auto idx = static_cast<std::int64_t>(rng.next_below(
            static_cast<std::uint64_t>(win->site_count())));
        CHECK(win->index_of(win->site_at(idx)) == idx);
    }
}

TEST_SUITE_END();
