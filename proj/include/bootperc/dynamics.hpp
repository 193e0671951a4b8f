#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bootperc/counts.hpp"
#include "bootperc/geometry.hpp"

namespace bootperc {

// Update rule variant. Standard: an uninfected site becomes infected when
// at least r of its 2d neighbours are infected. Modified: when at least r
// distinct axes carry an infected neighbour. Window exteriors always count
// as infected.
struct Rule {
    enum class Kind { Standard, Modified };
    Kind kind = Kind::Standard;
    int r = 2;

    static Rule standard(int r) { return Rule{Kind::Standard, r}; }
    static Rule modified(int r) { return Rule{Kind::Modified, r}; }
    bool operator==(const Rule&) const = default;
};

void validate_rule(const Rule& rule, int d);

// Fixed-size bit array, one bit per site.
class BitGrid {
public:
    BitGrid() = default;
    explicit BitGrid(std::int64_t n, bool value = false);

    std::int64_t size() const { return n_; }
    bool test(std::int64_t i) const { return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1; }
    void set(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] |= 1ULL << (i & 63); }
    void reset(std::int64_t i) { words_[static_cast<std::size_t>(i >> 6)] &= ~(1ULL << (i & 63)); }
    void assign(std::int64_t i, bool v) { v ? set(i) : reset(i); }
    std::int64_t count() const;
    bool operator==(const BitGrid&) const = default;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> words() { return words_; }

private:
    std::int64_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

// Snapshot of the process at one time. Infection is monotone: the infected
// set only grows under step().
class Configuration {
public:
    Configuration(std::shared_ptr<const Lattice> lattice, Rule rule, BitGrid infected, int time = 0);

    static Configuration fully_infected(std::shared_ptr<const Lattice> lattice, Rule rule);
    static Configuration fully_uninfected(std::shared_ptr<const Lattice> lattice, Rule rule);
    static Configuration from_uninfected(std::shared_ptr<const Lattice> lattice, Rule rule,
                                         const std::vector<Site>& uninfected);

    const Lattice& lattice() const { return *lattice_; }
    std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
    const Rule& rule() const { return rule_; }
    int time() const { return time_; }
    const BitGrid& infected() const { return infected_; }

    bool is_infected(const Site& x) const { return infected_.test(lattice_->index_of(x)); }
    Count uninfected_count() const {
        return static_cast<Count>(lattice_->site_count() - infected_.count());
    }
    bool all_infected() const { return infected_.count() == lattice_->site_count(); }

    // In-place single update; step() is the value-semantics wrapper.
    void advance();

private:
    std::shared_ptr<const Lattice> lattice_;
    Rule rule_;
    BitGrid infected_;
    int time_ = 0;
};

Configuration step(const Configuration& c);

// Iterate to the fixed point; returns the closed configuration and the
// number of steps taken. Hitting max_steps (default n*d on a torus, site
// count on a window) before stabilizing is an internal error.
std::pair<Configuration, int> closure(const Configuration& c, std::optional<int> max_steps = {});

// Least t with everything infected, or nullopt when the closure is proper.
std::optional<int> percolation_time(const Configuration& c, std::optional<int> max_steps = {});

// Infection layers A_0..A_horizon of a run started from `start` (clamped at
// the fixed point if it is reached earlier).
class Trajectory {
public:
    static Trajectory run(const Configuration& start, int horizon);

    int horizon() const { return horizon_; }
    const BitGrid& at(int time) const;
    bool infected_at(int time, std::int64_t idx) const { return at(time).test(idx); }
    Count uninfected_count_at(int time) const;

private:
    int horizon_ = 0;
    std::int64_t site_count_ = 0;
    std::vector<BitGrid> layers_;
};

// Sites x in B_horizon(center) still uninfected at time horizon - |x - center|.
std::vector<Site> protected_sites(const Configuration& c, int horizon, const Site& center);

// |V \ A_t| for the run started at c.
Count uninfected_count_at(const Configuration& c, int t);

}  // namespace bootperc
