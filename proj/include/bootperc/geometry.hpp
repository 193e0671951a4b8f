#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace bootperc {

using Coord = int;

// A lattice point. Torus sites use canonical coordinates in [0, n);
// window sites use signed coordinates centred on the origin.
struct Site {
    std::vector<Coord> coords;

    Site() = default;
    explicit Site(std::vector<Coord> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    Coord operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
    Coord& operator[](int i) { return coords[static_cast<std::size_t>(i)]; }

    bool operator==(const Site&) const = default;
    auto operator<=>(const Site&) const = default;
};

Site origin_site(int d);

// Per-coordinate tag driving directional site filters.
enum class CompatTag : std::int8_t { Neg = -1, Fixed = 0, Pos = 1, Free = 2 };

struct CompatibilityFunction {
    std::vector<CompatTag> tags;

    static CompatibilityFunction all_free(int d);

    int dim() const { return static_cast<int>(tags.size()); }
    CompatTag operator()(int i) const { return tags[static_cast<std::size_t>(i)]; }

    std::vector<int> pos() const;
    std::vector<int> neg() const;
    std::vector<int> fixed() const;
    std::vector<int> free_coords() const;

    bool operator==(const CompatibilityFunction&) const = default;
};

// Coordinate index i is 0-based everywhere in this codebase.
CompatibilityFunction restrict_coord(const CompatibilityFunction& c, int i);

// Partial order: y is above x when y_i >= x_i wherever x_i > 0 and
// y_i <= x_i wherever x_i < 0 (coordinates with x_i = 0 are unconstrained).
bool is_above(const Site& x, const Site& y);

bool is_compatible(const Site& x, const Site& y, const CompatibilityFunction& c);

// Signed offsets of the l1 ball of the given radius, in lexicographic order.
std::vector<Site> ball_offsets(int d, int radius);
std::int64_t ball_size(int d, int radius);

// The arena for the dynamics: either the discrete torus (Z/nZ)^d or a
// finite window (the l1 ball of radius t) whose exterior is treated as
// permanently infected by the dynamics.
//
// Site indexing is the documented snapshot layout:
//   torus:  index = sum_i x_i * n^i   (coordinate 0 least significant)
//   window: rank of the site in the lexicographic enumeration of the ball.
// Immutable after construction; safe to share across threads.
class Lattice {
public:
    enum class Kind { Torus, Window };

    static std::shared_ptr<const Lattice> make_torus(int d, int n);
    static std::shared_ptr<const Lattice> make_window(int d, int t);

    Kind kind() const { return kind_; }
    bool is_torus() const { return kind_ == Kind::Torus; }
    int dim() const { return d_; }
    int side() const { return n_; }     // torus only
    int radius() const { return t_; }   // window only
    std::int64_t site_count() const { return count_; }

    bool contains(const Site& x) const;
    std::int64_t index_of(const Site& x) const;
    Site site_at(std::int64_t idx) const;

    // l1 norm relative to the origin; torus coordinates wrap.
    int l1_norm(const Site& x) const;
    int distance(const Site& x, const Site& y) const;

    struct Neighbour {
        Site site;
        bool exterior = false;
    };
    // Exactly 2d entries, x +- e_i; window neighbours with norm > t are
    // flagged exterior.
    std::vector<Neighbour> neighbours(const Site& x) const;

    // Index-level adjacency used by the dynamics: slot 2a is +e_a, slot
    // 2a+1 is -e_a; -1 means the neighbour is exterior (window only).
    const std::int64_t* neighbour_row(std::int64_t idx) const {
        return adjacency_.data() + idx * 2 * d_;
    }

private:
    Lattice() = default;

    Kind kind_ = Kind::Torus;
    int d_ = 0;
    int n_ = 0;
    int t_ = 0;
    std::int64_t count_ = 0;
    std::vector<std::int64_t> strides_;   // torus
    std::vector<Site> sites_;             // window, lexicographic
    std::vector<std::int64_t> adjacency_;

    void build_adjacency();
};

// {y : distance(y, center) <= radius} restricted to lattice sites. On a
// torus, 2*radius >= n is rejected (the ball would wrap onto itself).
std::vector<Site> ball_sites(const Lattice& lat, const Site& center, int radius);
std::vector<Site> sphere_sites(const Lattice& lat, const Site& center, int radius);

}  // namespace bootperc
