#include "bootperc/dynamics.hpp"

#include <bit>
#include <stdexcept>

namespace bootperc {

void validate_rule(const Rule& rule, int d) {
    if (rule.kind == Rule::Kind::Standard) {
        if (rule.r < 2 || rule.r > 2 * d)
            throw std::invalid_argument("standard rule needs 2 <= r <= 2d");
    } else {
        if (rule.r < 2 || rule.r > d)
            throw std::invalid_argument("modified rule needs 2 <= r <= d");
    }
}

BitGrid::BitGrid(std::int64_t n, bool value) : n_(n) {
    words_.assign(static_cast<std::size_t>((n + 63) / 64), value ? ~0ULL : 0ULL);
    if (value && n % 64 != 0 && !words_.empty()) words_.back() = (1ULL << (n % 64)) - 1;
}

std::int64_t BitGrid::count() const {
    std::int64_t total = 0;
    for (const std::uint64_t w : words_) total += std::popcount(w);
    return total;
}

Configuration::Configuration(std::shared_ptr<const Lattice> lattice, Rule rule, BitGrid infected,
                             int time)
    : lattice_(std::move(lattice)), rule_(rule), infected_(std::move(infected)), time_(time) {
    if (!lattice_) throw std::invalid_argument("configuration needs a lattice");
    validate_rule(rule_, lattice_->dim());
    if (infected_.size() != lattice_->site_count())
        throw std::invalid_argument("configuration bit grid size mismatch");
    if (time_ < 0) throw std::invalid_argument("configuration time must be >= 0");
}

Configuration Configuration::fully_infected(std::shared_ptr<const Lattice> lattice, Rule rule) {
    BitGrid bits(lattice->site_count(), true);
    return Configuration(std::move(lattice), rule, std::move(bits));
}

Configuration Configuration::fully_uninfected(std::shared_ptr<const Lattice> lattice, Rule rule) {
    BitGrid bits(lattice->site_count(), false);
    return Configuration(std::move(lattice), rule, std::move(bits));
}

Configuration Configuration::from_uninfected(std::shared_ptr<const Lattice> lattice, Rule rule,
                                             const std::vector<Site>& uninfected) {
    BitGrid bits(lattice->site_count(), true);
    for (const Site& x : uninfected) bits.reset(lattice->index_of(x));
    return Configuration(std::move(lattice), rule, std::move(bits));
}

void Configuration::advance() {
    const Lattice& lat = *lattice_;
    const std::int64_t count = lat.site_count();
    const int d = lat.dim();
    const int slots = 2 * d;
    BitGrid next = infected_;
    for (std::int64_t idx = 0; idx < count; ++idx) {
        if (infected_.test(idx)) continue;
        const std::int64_t* row = lat.neighbour_row(idx);
        if (rule_.kind == Rule::Kind::Standard) {
            int hits = 0;
            for (int s = 0; s < slots; ++s) {
                const std::int64_t j = row[s];
                hits += (j < 0) ? 1 : static_cast<int>(infected_.test(j));
            }
            if (hits >= rule_.r) next.set(idx);
        } else {
            int axes = 0;
            for (int a = 0; a < d; ++a) {
                const std::int64_t jp = row[2 * a];
                const std::int64_t jm = row[2 * a + 1];
                const bool occ = (jp < 0 || infected_.test(jp)) || (jm < 0 || infected_.test(jm));
                axes += static_cast<int>(occ);
            }
            if (axes >= rule_.r) next.set(idx);
        }
    }
    infected_ = std::move(next);
    ++time_;
}

Configuration step(const Configuration& c) {
    Configuration out = c;
    out.advance();
    return out;
}

static int default_step_cap(const Lattice& lat) {
    if (lat.is_torus()) return lat.side() * lat.dim();
    return static_cast<int>(lat.site_count());
}

std::pair<Configuration, int> closure(const Configuration& c, std::optional<int> max_steps) {
    const int cap = max_steps.value_or(default_step_cap(c.lattice()));
    Configuration cur = c;
    for (int steps = 0;; ++steps) {
        Configuration next = step(cur);
        if (next.infected() == cur.infected()) return {std::move(cur), steps};
        if (steps >= cap)
            throw std::runtime_error("closure did not stabilize within the step cap");
        cur = std::move(next);
    }
}

std::optional<int> percolation_time(const Configuration& c, std::optional<int> max_steps) {
    if (!c.lattice().is_torus())
        throw std::invalid_argument("percolation_time is defined on torus lattices");
    if (c.all_infected()) return 0;
    const int cap = max_steps.value_or(default_step_cap(c.lattice()));
    Configuration cur = c;
    for (int steps = 1;; ++steps) {
        Configuration next = step(cur);
        if (next.all_infected()) return steps;
        if (next.infected() == cur.infected()) return std::nullopt;
        if (steps >= cap)
            throw std::runtime_error("percolation_time did not stabilize within the step cap");
        cur = std::move(next);
    }
}

Trajectory Trajectory::run(const Configuration& start, int horizon) {
    if (horizon < 0) throw std::invalid_argument("trajectory horizon must be >= 0");
    Trajectory traj;
    traj.horizon_ = horizon;
    traj.site_count_ = start.lattice().site_count();
    traj.layers_.push_back(start.infected());
    Configuration cur = start;
    for (int s = 1; s <= horizon; ++s) {
        Configuration next = step(cur);
        if (next.infected() == cur.infected()) break;  // fixed point; later layers repeat
        traj.layers_.push_back(next.infected());
        cur = std::move(next);
    }
    return traj;
}

const BitGrid& Trajectory::at(int time) const {
    if (time < 0 || time > horizon_) throw std::out_of_range("trajectory time out of range");
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(time), layers_.size() - 1);
    return layers_[i];
}

Count Trajectory::uninfected_count_at(int time) const {
    return static_cast<Count>(site_count_ - at(time).count());
}

std::vector<Site> protected_sites(const Configuration& c, int horizon, const Site& center) {
    const Lattice& lat = c.lattice();
    if (lat.is_torus()) {
        if (lat.side() <= 2 * horizon)
            throw std::invalid_argument("protected_sites needs n > 2*horizon on a torus");
    } else if (lat.radius() < horizon + lat.l1_norm(center)) {
        throw std::invalid_argument("protected_sites needs the ball inside the window");
    }
    const Trajectory traj = Trajectory::run(c, horizon);
    std::vector<Site> out;
    for (const Site& x : ball_sites(lat, center, horizon)) {
        const int k = lat.distance(x, center);
        if (!traj.infected_at(horizon - k, lat.index_of(x))) out.push_back(x);
    }
    return out;
}

Count uninfected_count_at(const Configuration& c, int t) {
    if (t < 0) throw std::invalid_argument("uninfected_count_at: time must be >= 0");
    return Trajectory::run(c, t).uninfected_count_at(t);
}

}  // namespace bootperc
