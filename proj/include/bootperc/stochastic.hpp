#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bootperc/dynamics.hpp"
#include "bootperc/extremal.hpp"
#include "bootperc/rng.hpp"

namespace bootperc {

// Seeded experiment description. Sites are uninfected independently with
// probability q = 1 - p; trial substreams are derived from (seed, trial)
// only, so results are reproducible under any worker count.
struct TrialPlan {
    int d = 2;
    int n = 16;
    Rule rule = Rule::standard(2);
    double q = 0.0;
    long trials = 1;
    std::uint64_t seed = 0;
    std::optional<int> horizon;    // t for uninfected-count observables
    std::optional<int> max_steps;  // closure cap; defaults to n*d
    int jobs = 1;

    void validate() const;
};

struct SummaryStats {
    long trials = 0;
    std::map<long, long> time_histogram;  // finite percolation times
    long infinite_count = 0;              // trials with no percolation
    std::optional<long> max_finite_time;
    std::map<long, long> f_histogram;     // uninfected count at the horizon
    double f_mean = 0.0;
    double f_variance = 0.0;
    double f_mean_ci3 = 0.0;              // 3 sigma radius for the mean
};

Configuration sample_configuration(const TrialPlan& plan, long trial_index,
                                   std::shared_ptr<const Lattice> lattice);

// Exact probability that the origin is uninfected at time t, evaluated from
// the full protecting-set census of B_t: sum over protecting U of
// q^|U| p^(|B_t|-|U|).
struct Rho1Polynomial {
    int ball_size = 0;
    int min_size = 0;
    std::vector<Count> counts_by_excess;
    double eval(double q) const;
};
Rho1Polynomial exact_rho1_polynomial(int d, Rule rule, int t, const SearchBudget& budget = {});
double exact_rho1(int d, Rule rule, int t, double q, const SearchBudget& budget = {});

// First-order approximation g_{d,r} q^{m_{d,r}(t)} (supercritical).
double rho1_asymptotic(int d, int r, int t, double q);

// Poisson approximation error bound under translation invariance with
// dependency neighbourhoods of the given size.
double stein_chen_bound(double lambda, double n_sites, double neighbourhood_size, double rho1,
                        double rho2);

// Total-variation distance between an empirical histogram and Poisson(lambda).
double tv_distance_to_poisson(const std::map<long, long>& histogram, long trials, double lambda);

// Smallest q with n^d * rho1(q) = lambda_target (bisection; rho1 is
// monotone in q).
double solve_q_for_lambda(int d, Rule rule, int t, int n, double lambda_target,
                          const SearchBudget& budget = {});

// Empirical law of the percolation time T over the planned trials.
SummaryStats run_time_distribution(const TrialPlan& plan);

struct PoissonReport {
    SummaryStats stats;
    int horizon = 0;
    double lambda_exact = 0.0;
    double mean_abs_error = 0.0;
    double tv_distance = 0.0;
    double rho1 = 0.0;
    double rho2_estimate = 0.0;
    long rho2_trials = 0;
    double stein_chen = 0.0;
    long fraction_zero_numerator = 0;  // trials with F(t,n) = 0
    double tbound_max = 0.0;           // max over c <= 2d of t^c q (precondition log)
    bool tbound_ok = false;
};

// Empirical distribution of the number of uninfected sites at time t,
// compared against Poisson(n^d * rho1). Asserts the per-trial identity
// {T <= t} <=> {F(t,n) = 0}.
PoissonReport poisson_comparison(const TrialPlan& plan, int t);

// Paired-site Monte Carlo estimate of rho2 = max P(x and y both uninfected
// at time t) over 0 < |x-y| <= 2t (diagnostic only).
double estimate_rho2(const TrialPlan& plan, int t, long mc_trials);

}  // namespace bootperc
