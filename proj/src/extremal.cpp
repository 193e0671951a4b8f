#include "bootperc/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <thread>

namespace bootperc {

namespace {

constexpr int kMaxDim = 8;

// Window geometry specialized for exhaustive search: at most 64 sites,
// origin at bit 0, sites ordered by (norm, lex) so symmetry orbits stay
// within spheres.
struct Window64 {
    int d = 0;
    int t = 0;
    int n = 0;
    std::vector<Site> sites;
    std::vector<int> norms;
    std::vector<std::uint64_t> nbr_mask;              // in-window neighbours
    std::vector<int> ext_count;                       // exterior neighbours
    std::vector<std::array<std::uint64_t, kMaxDim>> axis_mask;
    std::vector<std::array<std::uint8_t, kMaxDim>> axis_ext;
    std::uint64_t full = 0;

    Window64(int d_, int t_) : d(d_), t(t_) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("window search: 1 <= d <= 8");
        sites = ball_offsets(d, t);
        std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
            int na = 0, nb = 0;
            for (int i = 0; i < a.dim(); ++i) na += std::abs(a[i]);
            for (int i = 0; i < b.dim(); ++i) nb += std::abs(b[i]);
            if (na != nb) return na < nb;
            return a < b;
        });
        n = static_cast<int>(sites.size());
        if (n > 64)
            throw BudgetExhausted("window has " + std::to_string(n) +
                                  " sites; exhaustive search supports at most 64");
        full = n == 64 ? ~0ULL : (1ULL << n) - 1;
        norms.resize(static_cast<std::size_t>(n));
        nbr_mask.assign(static_cast<std::size_t>(n), 0);
        ext_count.assign(static_cast<std::size_t>(n), 0);
        axis_mask.assign(static_cast<std::size_t>(n), {});
        axis_ext.assign(static_cast<std::size_t>(n), {});
        std::map<Site, int> index;
        for (int i = 0; i < n; ++i) index[sites[static_cast<std::size_t>(i)]] = i;
        for (int i = 0; i < n; ++i) {
            const Site& x = sites[static_cast<std::size_t>(i)];
            int norm = 0;
            for (int c = 0; c < d; ++c) norm += std::abs(x[c]);
            norms[static_cast<std::size_t>(i)] = norm;
            for (int a = 0; a < d; ++a) {
                for (const int sign : {+1, -1}) {
                    Site y = x;
                    y[a] += sign;
                    const auto it = index.find(y);
                    if (it == index.end()) {
                        ++ext_count[static_cast<std::size_t>(i)];
                        axis_ext[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = 1;
                    } else {
                        nbr_mask[static_cast<std::size_t>(i)] |= 1ULL << it->second;
                        axis_mask[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] |=
                            1ULL << it->second;
                    }
                }
            }
        }
    }

    int index_of(const Site& x) const {
        for (int i = 0; i < n; ++i) {
            if (sites[static_cast<std::size_t>(i)] == x) return i;
        }
        return -1;
    }

    std::uint64_t mask_of(const std::vector<Site>& set) const {
        std::uint64_t mask = 0;
        for (const Site& x : set) {
            const int i = index_of(x);
            if (i < 0) throw std::invalid_argument("site outside the search window");
            mask |= 1ULL << i;
        }
        return mask;
    }

    std::vector<Site> sites_of(std::uint64_t mask) const {
        std::vector<Site> out;
        for (std::uint64_t rem = mask; rem;) {
            const int i = std::countr_zero(rem);
            rem &= rem - 1;
            out.push_back(sites[static_cast<std::size_t>(i)]);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::uint64_t infect_step(std::uint64_t infected, const Rule& rule) const {
        std::uint64_t newly = 0;
        for (std::uint64_t rem = full & ~infected; rem;) {
            const int i = std::countr_zero(rem);
            rem &= rem - 1;
            if (rule.kind == Rule::Kind::Standard) {
                const int hits = ext_count[static_cast<std::size_t>(i)] +
                                 std::popcount(nbr_mask[static_cast<std::size_t>(i)] & infected);
                if (hits >= rule.r) newly |= 1ULL << i;
            } else {
                int axes = 0;
                for (int a = 0; a < d; ++a) {
                    const bool occ =
                        axis_ext[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] ||
                        (axis_mask[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] & infected);
                    axes += static_cast<int>(occ);
                }
                if (axes >= rule.r) newly |= 1ULL << i;
            }
        }
        return newly;
    }

    // Origin still uninfected after `steps` updates from "everything except
    // `uninfected` infected".
    bool protects(std::uint64_t uninfected, const Rule& rule, int steps) const {
        if (!(uninfected & 1)) return false;
        std::uint64_t infected = full & ~uninfected;
        for (int s = 0; s < steps; ++s) {
            const std::uint64_t newly = infect_step(infected, rule);
            if (!newly) return true;
            infected |= newly;
            if (infected & 1) return false;
        }
        return !(infected & 1);
    }

    // Infected masks A_0..A_steps (clamped at the fixed point).
    std::vector<std::uint64_t> trajectory(std::uint64_t uninfected, const Rule& rule,
                                          int steps) const {
        std::vector<std::uint64_t> layers;
        std::uint64_t infected = full & ~uninfected;
        layers.push_back(infected);
        for (int s = 0; s < steps; ++s) {
            const std::uint64_t newly = infect_step(infected, rule);
            if (!newly) break;
            infected |= newly;
            layers.push_back(infected);
        }
        return layers;
    }

    std::uint64_t infected_at(const std::vector<std::uint64_t>& layers, int time) const {
        const std::size_t i = std::min(static_cast<std::size_t>(time), layers.size() - 1);
        return layers[i];
    }

    // Protected sites relative to global horizon: x with x notin A_{horizon-|x|}.
    std::uint64_t protected_mask(const std::vector<std::uint64_t>& layers, int horizon) const {
        std::uint64_t out = 0;
        for (int i = 0; i < n; ++i) {
            const int k = norms[static_cast<std::size_t>(i)];
            if (k > horizon) continue;
            if (!(infected_at(layers, horizon - k) >> i & 1)) out |= 1ULL << i;
        }
        return out;
    }
};

// Signed coordinate permutations acting on window site indices (the
// hyperoctahedral group fixing the origin).
std::vector<std::vector<std::uint8_t>> build_symmetry_tables(const Window64& w) {
    std::vector<std::vector<std::uint8_t>> tables;
    std::map<Site, int> index;
    for (int i = 0; i < w.n; ++i) index[w.sites[static_cast<std::size_t>(i)]] = i;
    std::vector<int> perm(static_cast<std::size_t>(w.d));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        for (int signbits = 0; signbits < (1 << w.d); ++signbits) {
            std::vector<std::uint8_t> table(static_cast<std::size_t>(w.n));
            for (int i = 0; i < w.n; ++i) {
                const Site& x = w.sites[static_cast<std::size_t>(i)];
                Site y = origin_site(w.d);
                for (int c = 0; c < w.d; ++c) {
                    const int v = (signbits >> c & 1) ? -x[c] : x[c];
                    y[static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])] = v;
                }
                table[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(index.at(y));
            }
            tables.push_back(std::move(table));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return tables;
}

std::uint64_t permute_mask(const std::vector<std::uint8_t>& table, std::uint64_t mask) {
    std::uint64_t out = 0;
    for (std::uint64_t rem = mask; rem;) {
        const int i = std::countr_zero(rem);
        rem &= rem - 1;
        out |= 1ULL << table[static_cast<std::size_t>(i)];
    }
    return out;
}

// Order on index sets by their first differing element; the minimum of an
// orbit under this order is the canonical representative.
bool set_lex_less(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t diff = a ^ b;
    if (!diff) return false;
    return (a >> std::countr_zero(diff)) & 1;
}

struct SweepConfig {
    const Window64* window = nullptr;
    Rule rule;
    int t = 0;
    int target = 0;
    bool symmetry = false;
    const std::vector<std::vector<std::uint8_t>>* tables = nullptr;
    // required_at[i] > 0 marks the index where sphere k is complete; any
    // protecting set must have chosen at least that many sites by then
    // (its restriction to B_k protects the origin to horizon k).
    const std::vector<int>* required_at = nullptr;
    bool first_hit_only = false;
    std::size_t witness_cap = 0;
    std::uint64_t node_cap = 0;
    std::atomic<std::uint64_t>* global_nodes = nullptr;
};

struct SweepAccumulator {
    Count count = 0;
    std::vector<std::uint64_t> witness_masks;
    bool witnesses_complete = true;
    std::uint64_t nodes = 0;
    bool found = false;
    std::uint64_t first_witness = 0;
};

struct AbortSearch {};

class SizeSweep {
public:
    SizeSweep(const SweepConfig& cfg) : cfg_(cfg), w_(*cfg.window) {}

    void run(SweepAccumulator& acc, int start_index, std::uint64_t chosen, int chosen_count) {
        acc_ = &acc;
        // The caller guarantees protects(chosen | suffix(start_index)).
        dfs(start_index, chosen, chosen_count);
        acc_ = nullptr;
    }

    std::uint64_t suffix_from(int i) const {
        if (i >= w_.n) return 0;
        return w_.full & ~((1ULL << i) - 1);
    }

    bool bound_holds(std::uint64_t chosen, int i) const {
        return w_.protects(chosen | suffix_from(i), cfg_.rule, cfg_.t);
    }

    bool prefix_canonical(std::uint64_t chosen) const {
        for (const auto& table : *cfg_.tables) {
            if (set_lex_less(permute_mask(table, chosen), chosen)) return false;
        }
        return true;
    }

private:
    void count_node() {
        ++acc_->nodes;
        if ((acc_->nodes & 0xFFF) == 0 && cfg_.global_nodes) {
            const std::uint64_t total =
                cfg_.global_nodes->fetch_add(0x1000, std::memory_order_relaxed) + 0x1000;
            if (total > cfg_.node_cap) throw AbortSearch{};
        }
    }

    void record(std::uint64_t chosen) {
        if (!acc_->found) {
            acc_->found = true;
            acc_->first_witness = chosen;
        }
        if (cfg_.symmetry) {
            // Count the whole orbit; expand it for the witness list.
            std::uint64_t images_seen = 0;
            std::set<std::uint64_t> orbit;
            for (const auto& table : *cfg_.tables) orbit.insert(permute_mask(table, chosen));
            images_seen = orbit.size();
            acc_->count = checked_add(acc_->count, images_seen);
            if (acc_->witnesses_complete) {
                for (const std::uint64_t m : orbit) acc_->witness_masks.push_back(m);
            }
        } else {
            acc_->count = checked_add(acc_->count, 1);
            if (acc_->witnesses_complete) acc_->witness_masks.push_back(chosen);
        }
        if (acc_->witness_masks.size() > cfg_.witness_cap) {
            acc_->witness_masks.clear();
            acc_->witnesses_complete = false;
        }
    }

    // Invariant: protects(chosen | suffix(i)) holds on entry.
    void dfs(int i, std::uint64_t chosen, int chosen_count) {
        count_node();
        if (cfg_.first_hit_only && acc_->found) return;
        if (chosen_count < (*cfg_.required_at)[static_cast<std::size_t>(i)]) return;
        if (chosen_count == cfg_.target) {
            if (i >= w_.n || w_.protects(chosen, cfg_.rule, cfg_.t)) record(chosen);
            return;
        }
        if (w_.n - i < cfg_.target - chosen_count) return;
        // include site i
        {
            const std::uint64_t next = chosen | (1ULL << i);
            if (!cfg_.symmetry || prefix_canonical(next)) dfs(i + 1, next, chosen_count + 1);
        }
        if (cfg_.first_hit_only && acc_->found) return;
        // exclude site i
        if (bound_holds(chosen, i + 1)) dfs(i + 1, chosen, chosen_count);
    }

    const SweepConfig& cfg_;
    const Window64& w_;
    SweepAccumulator* acc_ = nullptr;
};

struct TaskSeed {
    int index = 0;
    std::uint64_t chosen = 0;
    int chosen_count = 0;
};

// Expand the top of the DFS into a fixed frontier of subtree roots. The
// frontier depends only on the problem, never on the worker count, so
// totals are identical for any --jobs value.
std::vector<TaskSeed> build_frontier(const SizeSweep& sweep, const Window64& w, int target,
                                     bool symmetry, const std::vector<int>& required_at, int depth,
                                     SweepAccumulator& setup) {
    std::vector<TaskSeed> frontier;
    std::vector<TaskSeed> queue{TaskSeed{1, 1, 1}};  // origin bit always included
    for (int level = 0; level < depth; ++level) {
        std::vector<TaskSeed> next;
        for (const TaskSeed& node : queue) {
            ++setup.nodes;
            if (node.chosen_count < required_at[static_cast<std::size_t>(node.index)]) continue;
            if (node.chosen_count == target || node.index >= w.n) {
                frontier.push_back(node);
                continue;
            }
            if (w.n - node.index < target - node.chosen_count) continue;
            const std::uint64_t inc = node.chosen | (1ULL << node.index);
            if (!symmetry || sweep.prefix_canonical(inc))
                next.push_back({node.index + 1, inc, node.chosen_count + 1});
            if (sweep.bound_holds(node.chosen, node.index + 1))
                next.push_back({node.index + 1, node.chosen, node.chosen_count});
        }
        queue = std::move(next);
    }
    frontier.insert(frontier.end(), queue.begin(), queue.end());
    return frontier;
}

// One full sweep at a fixed subset size. first_hit mode processes the
// frontier serially in order and stops at the first protecting set, which
// keeps the reported witness and node counts independent of --jobs.
SweepAccumulator run_sweep(const Window64& w, const Rule& rule, int t, int target, bool symmetry,
                           const std::vector<std::vector<std::uint8_t>>* tables,
                           const std::vector<int>& required_at, int jobs, std::uint64_t node_cap,
                           std::atomic<std::uint64_t>& global_nodes, std::size_t witness_cap,
                           bool first_hit_only) {
    SweepConfig cfg;
    cfg.window = &w;
    cfg.rule = rule;
    cfg.t = t;
    cfg.target = target;
    cfg.symmetry = symmetry;
    cfg.tables = tables;
    cfg.required_at = &required_at;
    cfg.first_hit_only = first_hit_only;
    cfg.witness_cap = witness_cap;
    cfg.node_cap = node_cap;
    cfg.global_nodes = &global_nodes;
    SizeSweep sweep(cfg);

    SweepAccumulator setup;
    if (target < 1 || target > w.n) return setup;
    if (target < required_at[static_cast<std::size_t>(w.n)]) return setup;
    if (!sweep.bound_holds(0, 0)) {  // even the full ball fails
        setup.nodes = 1;
        return setup;
    }
    const int depth = std::min(6, std::max(0, w.n - 1));
    std::vector<TaskSeed> frontier =
        build_frontier(sweep, w, target, symmetry, required_at, depth, setup);

    std::vector<SweepAccumulator> results(frontier.size());
    std::atomic<bool> aborted{false};
    const auto run_task = [&](std::size_t task) {
        SizeSweep local(cfg);
        try {
            local.run(results[task], frontier[task].index, frontier[task].chosen,
                      frontier[task].chosen_count);
        } catch (const AbortSearch&) {
            aborted.store(true, std::memory_order_relaxed);
        }
    };

    if (first_hit_only) {
        for (std::size_t task = 0; task < frontier.size(); ++task) {
            run_task(task);
            if (aborted.load(std::memory_order_relaxed)) break;
            if (results[task].found) break;
        }
    } else {
        const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(frontier.size())));
        if (workers == 1) {
            for (std::size_t task = 0; task < frontier.size(); ++task) {
                run_task(task);
                if (aborted.load(std::memory_order_relaxed)) break;
            }
        } else {
            std::vector<std::thread> pool;
            for (int wk = 0; wk < workers; ++wk) {
                pool.emplace_back([&, wk]() {
                    for (std::size_t task = static_cast<std::size_t>(wk); task < frontier.size();
                         task += static_cast<std::size_t>(workers)) {
                        if (aborted.load(std::memory_order_relaxed)) return;
                        run_task(task);
                    }
                });
            }
            for (std::thread& th : pool) th.join();
        }
    }

    SweepAccumulator total = setup;
    for (const SweepAccumulator& res : results) {
        total.count = checked_add(total.count, res.count);
        total.nodes += res.nodes;
        if (!res.witnesses_complete) total.witnesses_complete = false;
        if (res.found && !total.found) {
            total.found = true;
            total.first_witness = res.first_witness;
        }
        total.witness_masks.insert(total.witness_masks.end(), res.witness_masks.begin(),
                                   res.witness_masks.end());
    }
    if (total.witness_masks.size() > witness_cap) {
        total.witness_masks.clear();
        total.witnesses_complete = false;
    }
    if (aborted.load(std::memory_order_relaxed))
        throw BudgetExhausted("search node cap exceeded");
    return total;
}

struct SearchContext {
    Window64 window;
    std::vector<std::vector<std::uint8_t>> tables;
    bool symmetry = false;
    std::vector<int> required_at;  // cumulative sphere thresholds per index

    SearchContext(int d, Rule rule, int t, const SearchBudget& budget) : window(d, t) {
        validate_rule(rule, d);
        symmetry = budget.symmetry_reduction;
        if (symmetry) tables = build_symmetry_tables(window);

        // A set protecting to horizon t restricts to a set protecting to
        // horizon k on each inner ball, so the search-verified minima at
        // smaller radii bound the prefix of any candidate. Thresholds come
        // from the search itself (radius by radius), not the closed forms.
        required_at.assign(static_cast<std::size_t>(window.n) + 1, 0);
        SearchBudget sub = budget;
        sub.jobs = 1;
        sub.witness_cap = 0;
        for (int k = 0; k < t; ++k) {
            const int threshold = min_protecting_size(d, rule, k, sub).size;
            std::size_t sphere_end = 0;
            while (sphere_end < static_cast<std::size_t>(window.n) &&
                   window.norms[sphere_end] <= k)
                ++sphere_end;
            for (std::size_t i = sphere_end; i <= static_cast<std::size_t>(window.n); ++i)
                required_at[i] = std::max(required_at[i], threshold);
        }
    }
};

std::vector<std::uint64_t> window_trajectory(const Window64& w, const std::vector<Site>& uninfected,
                                             const Rule& rule, int t) {
    return w.trajectory(w.mask_of(uninfected), rule, t);
}

}  // namespace

bool protects_origin(const std::vector<Site>& uninfected, int d, Rule rule, int t) {
    validate_rule(rule, d);
    if (t < 0) throw std::invalid_argument("protects_origin: t must be >= 0");
    const Window64 w(d, t);
    return w.protects(w.mask_of(uninfected), rule, t);
}

MinSearchResult min_protecting_size(int d, Rule rule, int t, const SearchBudget& budget) {
    SearchContext ctx(d, rule, t, budget);
    std::atomic<std::uint64_t> nodes{0};
    MinSearchResult out;
    const int upper = budget.max_subset_size.value_or(ctx.window.n);
    for (int size = 1; size <= upper; ++size) {
        SweepAccumulator acc =
            run_sweep(ctx.window, rule, t, size, ctx.symmetry, &ctx.tables, ctx.required_at,
                      budget.jobs, budget.node_cap, nodes, 0, /*first_hit_only=*/true);
        out.nodes_visited += acc.nodes;
        if (out.nodes_visited > budget.node_cap) throw BudgetExhausted("search node cap exceeded");
        if (acc.found) {
            out.size = size;
            out.witness = ctx.window.sites_of(acc.first_witness);
            return out;
        }
    }
    throw BudgetExhausted("no protecting subset found within the size budget");
}

CensusResult census_by_excess(int d, Rule rule, int t, int k_max, const SearchBudget& budget) {
    const auto start = std::chrono::steady_clock::now();
    SearchContext ctx(d, rule, t, budget);
    std::atomic<std::uint64_t> nodes{0};

    CensusResult out;
    out.d = d;
    out.rule = rule;
    out.t = t;

    MinSearchResult min = min_protecting_size(d, rule, t, budget);
    out.min_size = min.size;
    out.nodes_visited += min.nodes_visited;

    const int kmax = std::min(k_max, ctx.window.n - min.size);
    for (int k = 0; k <= kmax; ++k) {
        SweepAccumulator acc =
            run_sweep(ctx.window, rule, t, min.size + k, ctx.symmetry, &ctx.tables,
                      ctx.required_at, budget.jobs, budget.node_cap, nodes, budget.witness_cap,
                      /*first_hit_only=*/false);
        out.nodes_visited += acc.nodes;
        if (out.nodes_visited > budget.node_cap) throw BudgetExhausted("search node cap exceeded");
        CensusEntry entry;
        entry.excess = k;
        entry.count = acc.count;
        entry.witnesses_complete = acc.witnesses_complete;
        if (acc.witnesses_complete) {
            std::sort(acc.witness_masks.begin(), acc.witness_masks.end());
            for (const std::uint64_t m : acc.witness_masks)
                entry.witnesses.push_back(ctx.window.sites_of(m));
        }
        out.entries.push_back(std::move(entry));
    }
    out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               start)
                         .count();
    return out;
}

SemiCanonicalMatch census_matches_semi_canonical(int d, int r, int t, const CensusResult& census) {
    if (census.entries.empty() || census.entries.front().excess != 0)
        throw std::invalid_argument("census needs a k=0 entry");
    const CensusEntry& zero = census.entries.front();
    if (!zero.witnesses_complete)
        throw std::invalid_argument("census k=0 witnesses were not retained");

    std::set<std::vector<Site>> census_sets(zero.witnesses.begin(), zero.witnesses.end());
    std::set<std::vector<Site>> enum_sets;
    for (const SemiCanonicalSet& scs : enumerate_semi_canonical(d, r, t)) enum_sets.insert(scs.sites);

    SemiCanonicalMatch match;
    match.census_count = zero.count;
    match.enumeration_count = static_cast<Count>(enum_sets.size());
    for (const auto& s : census_sets) {
        if (!enum_sets.count(s)) match.census_only.push_back(s);
    }
    for (const auto& s : enum_sets) {
        if (!census_sets.count(s)) match.enumeration_only.push_back(s);
    }
    match.matched = match.census_only.empty() && match.enumeration_only.empty() &&
                    census_sets.size() == static_cast<std::size_t>(zero.count);
    return match;
}

std::vector<Count> protected_sphere_profile(const std::vector<Site>& witness, int d, Rule rule,
                                            int t) {
    validate_rule(rule, d);
    const Window64 w(d, t);
    const auto layers = window_trajectory(w, witness, rule, t);
    const std::uint64_t prot = w.protected_mask(layers, t);
    std::vector<Count> profile(static_cast<std::size_t>(t) + 1, 0);
    for (int i = 0; i < w.n; ++i) {
        if (prot >> i & 1) ++profile[static_cast<std::size_t>(w.norms[static_cast<std::size_t>(i)])];
    }
    return profile;
}

bool per_sphere_minimality(const std::vector<Site>& witness, int d, int r, int t) {
    if (r < 2 || r > d) throw std::invalid_argument("per_sphere_minimality needs 2 <= r <= d");
    if (!protects_origin(witness, d, Rule::standard(r), t))
        throw std::invalid_argument("per_sphere_minimality needs a protecting witness");
    const auto profile = protected_sphere_profile(witness, d, Rule::standard(r), t);
    bool all_minimal = true;
    for (int k = 0; k <= t; ++k) {
        const Count got = profile[static_cast<std::size_t>(k)];
        const Count bound = sphere_protecting_count(d, r, k);
        if (got < bound)
            throw std::logic_error("protected sphere below the proven lower bound");
        if (got != bound) all_minimal = false;
    }
    return all_minimal;
}

bool stability_prefix_check(const std::vector<Site>& witness, int d, int r, int t, int c) {
    if (c < 0 || c > t) throw std::invalid_argument("stability_prefix_check needs 0 <= c <= t");
    const Window64 w(d, t);
    const Rule rule = Rule::standard(r);
    if (!w.protects(w.mask_of(witness), rule, t))
        throw std::invalid_argument("stability_prefix_check needs a protecting witness");
    const auto layers = window_trajectory(w, witness, rule, t);
    const std::uint64_t prot = w.protected_mask(layers, t);
    const int radius = t - c;
    std::vector<Site> inside;
    for (int i = 0; i < w.n; ++i) {
        if (w.norms[static_cast<std::size_t>(i)] <= radius && (prot >> i & 1))
            inside.push_back(w.sites[static_cast<std::size_t>(i)]);
    }
    std::sort(inside.begin(), inside.end());
    for (const CanonicalSpec& spec : all_canonical_specs(d, r, radius)) {
        if (canonical_set(spec) == inside) return true;
    }
    return false;
}

bool subcritical_layer_bound(const std::vector<Site>& witness, int d, int r, int t) {
    if (r < d + 1 || r > 2 * d)
        throw std::invalid_argument("subcritical_layer_bound needs d+1 <= r <= 2d");
    const Window64 w(d, t);
    const Rule rule = Rule::standard(r);
    if (!w.protects(w.mask_of(witness), rule, t))
        throw std::invalid_argument("subcritical_layer_bound needs a protecting witness");
    const auto layers = window_trajectory(w, witness, rule, t);
    const std::uint64_t prot = w.protected_mask(layers, t);
    const std::uint64_t m = static_cast<std::uint64_t>(2 * d - r + 1);
    Count ball_protected = 0;
    Count ball_bound = 0;
    for (int k = 0; k <= t; ++k) {
        std::uint64_t sphere = 0;
        for (int i = 0; i < w.n; ++i) {
            if (w.norms[static_cast<std::size_t>(i)] == k) sphere |= 1ULL << i;
        }
        const Count got = static_cast<Count>(std::popcount(prot & sphere));
        const Count layer_bound = binomial(m, static_cast<std::uint64_t>(k));
        if (got < layer_bound) return false;
        ball_protected = checked_add(ball_protected, got);
        ball_bound = checked_add(ball_bound, layer_bound);
        if (ball_protected < ball_bound) return false;
    }
    return true;
}

}  // namespace bootperc
