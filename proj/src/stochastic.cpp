#include "bootperc/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace bootperc {

void TrialPlan::validate() const {
    if (n < 3) throw std::invalid_argument("plan: torus side must be >= 3");
    validate_rule(rule, d);
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("plan: q must lie in [0, 1]");
    if (trials < 1) throw std::invalid_argument("plan: trials must be >= 1");
    if (horizon && (*horizon < 0 || 2 * *horizon >= n))
        throw std::invalid_argument("plan: horizon needs 0 <= t and n > 2t");
    if (jobs < 1) throw std::invalid_argument("plan: jobs must be >= 1");
}

Configuration sample_configuration(const TrialPlan& plan, long trial_index,
                                   std::shared_ptr<const Lattice> lattice) {
    CounterRng rng = CounterRng::for_stream(plan.seed, static_cast<std::uint64_t>(trial_index));
    BitGrid infected(lattice->site_count(), false);
    for (std::int64_t idx = 0; idx < lattice->site_count(); ++idx) {
        if (!rng.bernoulli(plan.q)) infected.set(idx);
    }
    return Configuration(std::move(lattice), plan.rule, std::move(infected));
}

double Rho1Polynomial::eval(double q) const {
    const double p = 1.0 - q;
    long double total = 0.0L;
    for (std::size_t k = 0; k < counts_by_excess.size(); ++k) {
        const int size = min_size + static_cast<int>(k);
        total += static_cast<long double>(counts_by_excess[k]) *
                 std::pow(static_cast<long double>(q), size) *
                 std::pow(static_cast<long double>(p), ball_size - size);
    }
    return static_cast<double>(total);
}

Rho1Polynomial exact_rho1_polynomial(int d, Rule rule, int t, const SearchBudget& budget) {
    Rho1Polynomial poly;
    poly.ball_size = static_cast<int>(ball_size(d, t));
    const CensusResult census = census_by_excess(d, rule, t, poly.ball_size, budget);
    poly.min_size = census.min_size;
    for (const CensusEntry& entry : census.entries) poly.counts_by_excess.push_back(entry.count);
    return poly;
}

double exact_rho1(int d, Rule rule, int t, double q, const SearchBudget& budget) {
    return exact_rho1_polynomial(d, rule, t, budget).eval(q);
}

double rho1_asymptotic(int d, int r, int t, double q) {
    return static_cast<double>(extremal_set_count(d, r)) *
           std::pow(q, static_cast<double>(min_protecting_count(d, r, t)));
}

double stein_chen_bound(double lambda, double n_sites, double neighbourhood_size, double rho1,
                        double rho2) {
    if (lambda < 0 || n_sites < 0 || neighbourhood_size < 0 || rho1 < 0 || rho2 < 0)
        throw std::invalid_argument("stein_chen_bound: inputs must be nonnegative");
    const double factor = lambda > 1.0 ? 1.0 / lambda : 1.0;
    return factor * (n_sites * neighbourhood_size * rho1 * rho1 +
                     n_sites * (neighbourhood_size - 1.0) * rho2);
}

double tv_distance_to_poisson(const std::map<long, long>& histogram, long trials, double lambda) {
    if (trials < 1) throw std::invalid_argument("tv_distance: needs at least one trial");
    long max_value = 0;
    for (const auto& [value, count] : histogram) max_value = std::max(max_value, value);
    double half_l1 = 0.0;
    double pmf = std::exp(-lambda);
    double poisson_mass = 0.0;
    for (long j = 0; j <= max_value; ++j) {
        if (j > 0) pmf *= lambda / static_cast<double>(j);
        const auto it = histogram.find(j);
        const double emp = it == histogram.end()
                               ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(trials);
        half_l1 += std::abs(emp - pmf);
        poisson_mass += pmf;
    }
    half_l1 += std::max(0.0, 1.0 - poisson_mass);  // Poisson tail beyond the observed support
    return 0.5 * half_l1;
}

double solve_q_for_lambda(int d, Rule rule, int t, int n, double lambda_target,
                          const SearchBudget& budget) {
    if (lambda_target <= 0) throw std::invalid_argument("solve_q_for_lambda: target must be > 0");
    const Rho1Polynomial poly = exact_rho1_polynomial(d, rule, t, budget);
    const double sites = std::pow(static_cast<double>(n), d);
    double lo = 0.0, hi = 1.0;
    if (sites * poly.eval(hi) < lambda_target)
        throw std::invalid_argument("solve_q_for_lambda: target not reachable");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (sites * poly.eval(mid) < lambda_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Static partition of trials over jobs; per-trial outputs land in caller
// arrays so aggregation order never depends on scheduling.
template <typename Fn>
void for_each_trial(long trials, int jobs, Fn&& fn) {
    const int workers = std::max(1, static_cast<int>(std::min<long>(jobs, trials)));
    if (workers == 1) {
        for (long i = 0; i < trials; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const long lo = trials * w / workers;
            const long hi = trials * (w + 1) / workers;
            try {
                for (long i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

constexpr long kInfiniteTime = -1;

}  // namespace

SummaryStats run_time_distribution(const TrialPlan& plan) {
    plan.validate();
    const auto lattice = Lattice::make_torus(plan.d, plan.n);
    std::vector<long> times(static_cast<std::size_t>(plan.trials), 0);
    for_each_trial(plan.trials, plan.jobs, [&](long trial) {
        const Configuration start = sample_configuration(plan, trial, lattice);
        const std::optional<int> time = percolation_time(start, plan.max_steps);
        times[static_cast<std::size_t>(trial)] = time ? *time : kInfiniteTime;
    });

    SummaryStats stats;
    stats.trials = plan.trials;
    for (const long time : times) {
        if (time == kInfiniteTime) {
            ++stats.infinite_count;
        } else {
            ++stats.time_histogram[time];
            if (!stats.max_finite_time || time > *stats.max_finite_time)
                stats.max_finite_time = time;
        }
    }
    return stats;
}

double estimate_rho2(const TrialPlan& plan, int t, long mc_trials) {
    // Joint uninfected probability for a pair at offset delta depends only
    // on the states inside B_t(0) u B_t(delta); a torus of side 4t+3 is a
    // faithful arena for every offset with |delta| <= 2t.
    const int side = std::max(3, 4 * t + 3);
    const auto lattice = Lattice::make_torus(plan.d, side);
    const Site origin = origin_site(plan.d);

    // Offsets up to coordinate permutations and sign flips.
    std::set<std::vector<Coord>> canon;
    std::vector<Site> reps;
    for (const Site& off : ball_offsets(plan.d, 2 * t)) {
        if (off == origin) continue;
        std::vector<Coord> key;
        for (int i = 0; i < plan.d; ++i) key.push_back(std::abs(off[i]));
        std::sort(key.begin(), key.end());
        if (canon.insert(key).second) reps.push_back(off);
    }

    double best = 0.0;
    TrialPlan sub = plan;
    sub.n = side;
    for (std::size_t rep = 0; rep < reps.size(); ++rep) {
        Site other = reps[rep];
        for (int i = 0; i < plan.d; ++i) other[i] = ((other[i] % side) + side) % side;
        const std::int64_t idx_a = lattice->index_of(origin);
        const std::int64_t idx_b = lattice->index_of(other);
        sub.seed = CounterRng::mix(plan.seed ^ (0xD1A6005EULL + rep));
        std::vector<char> hits(static_cast<std::size_t>(mc_trials), 0);
        for_each_trial(mc_trials, plan.jobs, [&](long trial) {
            const Configuration start = sample_configuration(sub, trial, lattice);
            const Trajectory traj = Trajectory::run(start, t);
            hits[static_cast<std::size_t>(trial)] =
                !traj.infected_at(t, idx_a) && !traj.infected_at(t, idx_b);
        });
        long total = 0;
        for (const char h : hits) total += h;
        best = std::max(best, static_cast<double>(total) / static_cast<double>(mc_trials));
    }
    return best;
}

PoissonReport poisson_comparison(const TrialPlan& plan, int t) {
    TrialPlan local = plan;
    local.horizon = t;
    local.validate();
    const auto lattice = Lattice::make_torus(plan.d, plan.n);

    std::vector<long> f_values(static_cast<std::size_t>(plan.trials), 0);
    std::vector<long> times(static_cast<std::size_t>(plan.trials), 0);
    for_each_trial(plan.trials, plan.jobs, [&](long trial) {
        const Configuration start = sample_configuration(local, trial, lattice);
        const Trajectory traj = Trajectory::run(start, t);
        const long f = static_cast<long>(traj.uninfected_count_at(t));
        f_values[static_cast<std::size_t>(trial)] = f;
        const std::optional<int> time = percolation_time(start, plan.max_steps);
        times[static_cast<std::size_t>(trial)] = time ? *time : kInfiniteTime;
        // Definitional identity, asserted per trial.
        const bool percolated_by_t = time && *time <= t;
        if (percolated_by_t != (f == 0))
            throw std::logic_error("per-trial identity {T<=t} <=> {F(t,n)=0} violated");
    });

    PoissonReport report;
    report.horizon = t;
    report.stats.trials = plan.trials;
    double sum = 0.0, sumsq = 0.0;
    for (long trial = 0; trial < plan.trials; ++trial) {
        const long f = f_values[static_cast<std::size_t>(trial)];
        ++report.stats.f_histogram[f];
        sum += static_cast<double>(f);
        sumsq += static_cast<double>(f) * static_cast<double>(f);
        if (f == 0) ++report.fraction_zero_numerator;
        const long time = times[static_cast<std::size_t>(trial)];
        if (time == kInfiniteTime) {
            ++report.stats.infinite_count;
        } else {
            ++report.stats.time_histogram[time];
            if (!report.stats.max_finite_time || time > *report.stats.max_finite_time)
                report.stats.max_finite_time = time;
        }
    }
    const double mean = sum / static_cast<double>(plan.trials);
    report.stats.f_mean = mean;
    report.stats.f_variance =
        sumsq / static_cast<double>(plan.trials) - mean * mean;

    const Rho1Polynomial poly = exact_rho1_polynomial(plan.d, plan.rule, t);
    report.rho1 = poly.eval(plan.q);
    const double sites = std::pow(static_cast<double>(plan.n), plan.d);
    report.lambda_exact = sites * report.rho1;
    report.stats.f_mean_ci3 =
        3.0 * std::sqrt(std::max(report.lambda_exact, 1e-300) / static_cast<double>(plan.trials));
    report.mean_abs_error = std::abs(mean - report.lambda_exact);
    report.tv_distance = tv_distance_to_poisson(report.stats.f_histogram, plan.trials,
                                                report.lambda_exact);

    report.rho2_trials = std::min<long>(200000, std::max<long>(20000, plan.trials));
    report.rho2_estimate = estimate_rho2(local, t, report.rho2_trials);
    report.stein_chen = stein_chen_bound(report.lambda_exact, sites,
                                         static_cast<double>(ball_size(plan.d, 2 * t)),
                                         report.rho1, report.rho2_estimate);

    // Smallness precondition t^c q for c <= 2d, logged with the report.
    double tbound = 0.0;
    for (int c = 0; c <= 2 * plan.d; ++c)
        tbound = std::max(tbound, std::pow(static_cast<double>(std::max(t, 1)), c) * plan.q);
    report.tbound_max = tbound;
    report.tbound_ok = tbound < 0.5;
    return report;
}

}  // namespace bootperc
