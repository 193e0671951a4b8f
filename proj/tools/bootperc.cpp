#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bootperc/canonical.hpp"
#include "bootperc/counts.hpp"
#include "bootperc/dynamics.hpp"
#include "bootperc/extremal.hpp"
#include "bootperc/snapshot.hpp"
#include "bootperc/stochastic.hpp"

namespace {

using nlohmann::json;
using namespace bootperc;

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitPropertyViolated = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&tt, &tm_utc);
    std::strftime(buf, sizeof buf, "%FT%TZ", &tm_utc);
    return buf;
}

struct Manifest {
    std::string subcommand;
    json parameters = json::object();
    std::optional<std::uint64_t> seed;
    std::string started_at = iso_timestamp();

    json finish() const {
        json doc;
        doc["subcommand"] = subcommand;
        doc["parameters"] = parameters;
        if (seed) doc["seed"] = *seed;
        doc["artifact_version"] = kVersion;
        doc["started_at"] = started_at;
        doc["finished_at"] = iso_timestamp();
        return doc;
    }
};

void emit(json doc, const Manifest& manifest) {
    doc["manifest"] = manifest.finish();
    std::cout << doc.dump(2) << "\n";
}

Rule parse_rule(const std::string& kind, int r) {
    if (kind == "standard") return Rule::standard(r);
    if (kind == "modified") return Rule::modified(r);
    throw CLI::ValidationError("--rule", "must be 'standard' or 'modified'");
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

json site_to_json(const Site& x) { return json(x.coords); }

json sites_to_json(const std::vector<Site>& sites) {
    json arr = json::array();
    for (const Site& x : sites) arr.push_back(site_to_json(x));
    return arr;
}

json census_to_json(const CensusResult& census) {
    json doc;
    doc["d"] = census.d;
    doc["r"] = census.rule.r;
    doc["rule"] = census.rule.kind == Rule::Kind::Standard ? "standard" : "modified";
    doc["t"] = census.t;
    doc["ex"] = census.min_size;
    json entries = json::array();
    for (const CensusEntry& entry : census.entries) {
        json e;
        e["k"] = entry.excess;
        e["count"] = entry.count;
        if (entry.witnesses_complete) e["witnesses"] = [&] {
            json arr = json::array();
            for (const auto& w : entry.witnesses) arr.push_back(sites_to_json(w));
            return arr;
        }();
        entries.push_back(std::move(e));
    }
    doc["entries"] = std::move(entries);
    doc["runtime_ms"] = census.runtime_ms;
    doc["nodes_visited"] = census.nodes_visited;
    return doc;
}

json plan_to_json(const TrialPlan& plan) {
    json doc;
    doc["d"] = plan.d;
    doc["n"] = plan.n;
    doc["rule"] = {{"kind", plan.rule.kind == Rule::Kind::Standard ? "standard" : "modified"},
                   {"r", plan.rule.r}};
    doc["q"] = plan.q;
    doc["trials"] = plan.trials;
    doc["seed"] = plan.seed;
    if (plan.horizon) doc["t"] = *plan.horizon;
    doc["jobs"] = plan.jobs;
    return doc;
}

json summary_to_json(const SummaryStats& stats) {
    json t_hist = json::object();
    for (const auto& [value, count] : stats.time_histogram)
        t_hist[std::to_string(value)] = count;
    if (stats.infinite_count > 0) t_hist["inf"] = stats.infinite_count;
    return t_hist;
}

json f_hist_to_json(const SummaryStats& stats) {
    json f_hist = json::object();
    for (const auto& [value, count] : stats.f_histogram) f_hist[std::to_string(value)] = count;
    return f_hist;
}

void write_trials_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open --out file: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? ',' : '\n');
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
}

int default_jobs() {
    if (const char* env = std::getenv("BOOTPERC_JOBS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

int run_counts(int d, int r, int t, Manifest& manifest) {
    json results;
    results["m"] = min_protecting_count(d, r, t);
    if (r <= d) {
        results["l"] = sphere_protecting_count(d, r, t);
        results["m_modified"] = min_protecting_count_modified(d, r, t);
        results["g"] = extremal_set_count(d, r);
        results["g_modified"] = extremal_set_count_modified(d, r);
    } else {
        results["m_subcritical"] = results["m"];
    }
    emit(results, manifest);
    return kExitOk;
}

int run_identities(int d_max, int k_max, Manifest& manifest) {
    json failures = json::array();
    long checked = 0;
    for (int d = 2; d <= d_max; ++d) {
        for (int r = 2; r <= d; ++r) {
            for (int f = 0; f <= d; ++f) {
                for (int k = 0; k <= k_max; ++k) {
                    const IdentityCheck mini = identity_mini(d, r, f, k);
                    ++checked;
                    if (!mini.equal)
                        failures.push_back({{"identity", "mini"}, {"d", d}, {"r", r},
                                            {"f", f}, {"k", k},
                                            {"lhs", mini.lhs}, {"rhs", mini.rhs}});
                    if (d > r) {
                        const IdentityCheck mega = identity_mega(d, r, f, k);
                        ++checked;
                        if (!mega.equal)
                            failures.push_back({{"identity", "mega"}, {"d", d}, {"r", r},
                                                {"f", f}, {"k", k},
                                                {"lhs", mega.lhs}, {"rhs", mega.rhs}});
                    }
                }
            }
        }
    }
    json results;
    results["checked"] = checked;
    results["failures"] = failures;
    emit(results, manifest);
    return failures.empty() ? kExitOk : kExitPropertyViolated;
}

int run_canonical(int d, int r, int t, bool list_sets, Manifest& manifest) {
    json results;
    const CanonicalSpec spec = CanonicalSpec::standard(d, r, t);
    const std::vector<Site> base = canonical_set(spec);
    results["canonical_size"] = base.size();
    results["m"] = min_protecting_count(d, r, t);
    if (r <= d && t >= 2) {
        const auto semis = enumerate_semi_canonical(d, r, t);
        results["semi_canonical_count"] = semis.size();
        results["g_formula"] = extremal_set_count(d, r);
        if (list_sets) {
            json arr = json::array();
            for (const auto& scs : semis) arr.push_back(sites_to_json(scs.sites));
            results["semi_canonical_sets"] = std::move(arr);
        }
    }
    if (list_sets) results["canonical_set"] = sites_to_json(base);
    emit(results, manifest);
    return kExitOk;
}

int run_extremal(int d, int r, const std::string& rule_kind, int t, int k_max,
                 const SearchBudget& budget, Manifest& manifest) {
    const Rule rule = parse_rule(rule_kind, r);
    const CensusResult census = census_by_excess(d, rule, t, k_max, budget);
    emit(census_to_json(census), manifest);
    return kExitOk;
}

int run_simulate(const TrialPlan& plan, const std::string& out_csv, Manifest& manifest) {
    const auto started = std::chrono::steady_clock::now();
    const SummaryStats stats = run_time_distribution(plan);
    const double runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    json results;
    results["runtime_ms"] = runtime_ms;
    results["plan"] = plan_to_json(plan);
    results["empirical_T"] = summary_to_json(stats);
    results["seed"] = plan.seed;
    if (stats.max_finite_time) results["max_finite_T"] = *stats.max_finite_time;
    results["fraction_infinite"] =
        static_cast<double>(stats.infinite_count) / static_cast<double>(stats.trials);
    if (!out_csv.empty()) {
        std::vector<std::vector<std::string>> rows;
        // Re-derive per-trial values for the dump; identical streams.
        const auto lattice = Lattice::make_torus(plan.d, plan.n);
        for (long trial = 0; trial < plan.trials; ++trial) {
            const auto time = percolation_time(sample_configuration(plan, trial, lattice),
                                               plan.max_steps);
            rows.push_back({std::to_string(trial), time ? std::to_string(*time) : "inf"});
        }
        write_trials_csv(out_csv, {"trial", "percolation_time"}, rows);
    }
    emit(results, manifest);
    return kExitOk;
}

int run_poisson(const TrialPlan& plan, int t, const std::string& out_csv, Manifest& manifest) {
    const auto started = std::chrono::steady_clock::now();
    const PoissonReport report = poisson_comparison(plan, t);
    const double runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    json results;
    results["runtime_ms"] = runtime_ms;
    results["plan"] = plan_to_json(plan);
    results["empirical_T"] = summary_to_json(report.stats);
    results["empirical_F"] = f_hist_to_json(report.stats);
    results["lambda_exact"] = report.lambda_exact;
    results["rho1"] = report.rho1;
    results["f_mean"] = report.stats.f_mean;
    results["mean_abs_error"] = report.mean_abs_error;
    results["mean_ci3"] = report.stats.f_mean_ci3;
    results["fraction_zero"] = static_cast<double>(report.fraction_zero_numerator) /
                               static_cast<double>(report.stats.trials);
    results["tv_distance"] = report.tv_distance;
    results["stein_chen_bound"] = report.stein_chen;
    results["rho2_estimate"] = report.rho2_estimate;
    results["rho2_trials"] = report.rho2_trials;
    results["tbound"] = {{"max_tc_q", report.tbound_max}, {"ok", report.tbound_ok}};
    results["seed"] = plan.seed;
    if (!out_csv.empty()) {
        const auto lattice = Lattice::make_torus(plan.d, plan.n);
        std::vector<std::vector<std::string>> rows;
        for (long trial = 0; trial < plan.trials; ++trial) {
            const Configuration start = sample_configuration(plan, trial, lattice);
            const Trajectory traj = Trajectory::run(start, t);
            rows.push_back({std::to_string(trial),
                            std::to_string(traj.uninfected_count_at(t))});
        }
        write_trials_csv(out_csv, {"trial", "uninfected_at_t"}, rows);
    }
    emit(results, manifest);
    return kExitOk;
}

int run_snapshot(const std::string& in_path, const std::string& out_path, int steps, bool to_close,
                 std::optional<TrialPlan> init_plan, long init_trial, Manifest& manifest) {
    std::optional<Configuration> config;
    if (!in_path.empty()) {
        std::ifstream in(in_path);
        if (!in) throw std::runtime_error("cannot open snapshot: " + in_path);
        json doc = json::parse(in);
        config = configuration_from_snapshot(doc);
    } else if (init_plan) {
        const auto lattice = Lattice::make_torus(init_plan->d, init_plan->n);
        config = sample_configuration(*init_plan, init_trial, lattice);
    } else {
        throw CLI::ValidationError("snapshot", "needs --in or --new");
    }

    int steps_taken = 0;
    if (to_close) {
        auto [closed, n_steps] = closure(*config);
        config = std::move(closed);
        steps_taken = n_steps;
    } else {
        for (int s = 0; s < steps; ++s) config->advance();
        steps_taken = steps;
    }

    const json snap = to_snapshot(*config);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open --out file: " + out_path);
        out << snap.dump(2) << "\n";
    }
    json results;
    results["kind"] = snap.at("kind");
    results["d"] = snap.at("d");
    if (snap.contains("n")) results["n"] = snap.at("n");
    if (snap.contains("t")) results["t"] = snap.at("t");
    results["time"] = snap.at("time");
    results["steps_taken"] = steps_taken;
    results["uninfected"] = config->uninfected_count();
    results["all_infected"] = config->all_infected();
    if (out_path.empty()) results["snapshot"] = snap;
    emit(results, manifest);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bootstrap percolation laboratory"};
    app.require_subcommand(1);

    // counts
    auto* counts_cmd = app.add_subcommand("counts", "closed-form extremal quantities");
    int c_d = 2, c_r = 2, c_t = 0;
    counts_cmd->add_option("--d", c_d, "dimension")->required();
    counts_cmd->add_option("--r", c_r, "threshold")->required();
    counts_cmd->add_option("--t", c_t, "time / radius")->required();

    // identities
    auto* ident_cmd = app.add_subcommand("identities", "binomial identity grid sweep");
    int i_dmax = 6, i_kmax = 8;
    ident_cmd->add_option("--d-max", i_dmax, "largest dimension");
    ident_cmd->add_option("--k-max", i_kmax, "largest k");

    // canonical
    auto* canon_cmd = app.add_subcommand("canonical", "canonical and semi-canonical sets");
    int n_d = 2, n_r = 2, n_t = 2;
    bool n_list = false;
    canon_cmd->add_option("--d", n_d, "dimension")->required();
    canon_cmd->add_option("--r", n_r, "threshold")->required();
    canon_cmd->add_option("--t", n_t, "radius")->required();
    canon_cmd->add_flag("--list", n_list, "include the site sets in the output");

    // extremal
    auto* ext_cmd = app.add_subcommand("extremal", "exhaustive protecting-set census");
    int e_d = 2, e_r = 2, e_t = 1, e_kmax = 0, e_jobs = default_jobs();
    std::string e_rule = "standard";
    std::uint64_t e_node_cap = SearchBudget{}.node_cap;
    std::size_t e_witness_cap = SearchBudget{}.witness_cap;
    bool e_no_symmetry = false;
    ext_cmd->add_option("--d", e_d, "dimension")->required();
    ext_cmd->add_option("--r", e_r, "threshold")->required();
    ext_cmd->add_option("--t", e_t, "window radius")->required();
    ext_cmd->add_option("--rule", e_rule, "standard|modified");
    ext_cmd->add_option("--k-max", e_kmax, "largest excess");
    ext_cmd->add_option("--jobs", e_jobs, "worker count");
    ext_cmd->add_option("--node-cap", e_node_cap, "search node budget");
    ext_cmd->add_option("--witness-cap", e_witness_cap, "witness retention cap");
    ext_cmd->add_flag("--no-symmetry", e_no_symmetry, "disable symmetry reduction");

    // simulate / poisson / subcritical
    const auto add_plan_flags = [&](CLI::App* cmd, TrialPlan& plan,
                                    std::optional<std::uint64_t>& seed, std::string& rule,
                                    std::string& out_csv) {
        cmd->add_option("--d", plan.d, "dimension")->required();
        cmd->add_option("--n", plan.n, "torus side")->required();
        cmd->add_option("--r", plan.rule.r, "threshold")->required();
        cmd->add_option("--rule", rule, "standard|modified");
        cmd->add_option("--q", plan.q, "per-site uninfected probability")->required();
        cmd->add_option("--trials", plan.trials, "trial count")->required();
        cmd->add_option("--seed", seed, "master seed (drawn from entropy when omitted)");
        cmd->add_option("--jobs", plan.jobs, "worker count");
        cmd->add_option("--max-steps", plan.max_steps, "closure step cap");
        cmd->add_option("--out", out_csv, "per-trial CSV path");
    };

    auto* sim_cmd = app.add_subcommand("simulate", "percolation time distribution");
    TrialPlan sim_plan;
    sim_plan.jobs = default_jobs();
    std::optional<std::uint64_t> sim_seed;
    std::string sim_rule = "standard", sim_csv;
    add_plan_flags(sim_cmd, sim_plan, sim_seed, sim_rule, sim_csv);

    auto* poi_cmd = app.add_subcommand("poisson", "uninfected-count law vs Poisson");
    TrialPlan poi_plan;
    poi_plan.jobs = default_jobs();
    std::optional<std::uint64_t> poi_seed;
    std::string poi_rule = "standard", poi_csv;
    int poi_t = 1;
    std::optional<double> poi_lambda;
    add_plan_flags(poi_cmd, poi_plan, poi_seed, poi_rule, poi_csv);
    poi_cmd->add_option("--t", poi_t, "observation time")->required();
    poi_cmd->add_option("--lambda", poi_lambda,
                        "solve q from n^d rho1(q) = lambda (overrides --q)");
    poi_cmd->get_option("--q")->required(false);

    auto* sub_cmd = app.add_subcommand("subcritical", "subcritical-regime time distribution");
    TrialPlan sub_plan;
    sub_plan.jobs = default_jobs();
    std::optional<std::uint64_t> sub_seed;
    std::string sub_rule = "standard", sub_csv;
    add_plan_flags(sub_cmd, sub_plan, sub_seed, sub_rule, sub_csv);

    // snapshot
    auto* snap_cmd = app.add_subcommand("snapshot", "read, advance, write configuration files");
    std::string s_in, s_out;
    int s_steps = 0;
    bool s_closure = false, s_new = false;
    TrialPlan s_plan;
    std::optional<std::uint64_t> s_seed;
    std::string s_rule = "standard";
    long s_trial = 0;
    snap_cmd->add_option("--in", s_in, "input snapshot path");
    snap_cmd->add_option("--out", s_out, "output snapshot path");
    snap_cmd->add_option("--steps", s_steps, "advance this many steps");
    snap_cmd->add_flag("--closure", s_closure, "advance to the fixed point");
    snap_cmd->add_flag("--new", s_new, "sample a fresh configuration");
    snap_cmd->add_option("--d", s_plan.d, "dimension (with --new)");
    snap_cmd->add_option("--n", s_plan.n, "torus side (with --new)");
    snap_cmd->add_option("--r", s_plan.rule.r, "threshold (with --new)");
    snap_cmd->add_option("--rule", s_rule, "standard|modified (with --new)");
    snap_cmd->add_option("--q", s_plan.q, "uninfected probability (with --new)");
    snap_cmd->add_option("--seed", s_seed, "master seed (with --new)");
    snap_cmd->add_option("--trial", s_trial, "trial index (with --new)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    Manifest manifest;
    try {
        if (counts_cmd->parsed()) {
            manifest.subcommand = "counts";
            manifest.parameters = {{"d", c_d}, {"r", c_r}, {"t", c_t}};
            return run_counts(c_d, c_r, c_t, manifest);
        }
        if (ident_cmd->parsed()) {
            manifest.subcommand = "identities";
            manifest.parameters = {{"d_max", i_dmax}, {"k_max", i_kmax}};
            return run_identities(i_dmax, i_kmax, manifest);
        }
        if (canon_cmd->parsed()) {
            manifest.subcommand = "canonical";
            manifest.parameters = {{"d", n_d}, {"r", n_r}, {"t", n_t}, {"list", n_list}};
            return run_canonical(n_d, n_r, n_t, n_list, manifest);
        }
        if (ext_cmd->parsed()) {
            manifest.subcommand = "extremal";
            manifest.parameters = {{"d", e_d}, {"r", e_r},       {"t", e_t},
                                   {"rule", e_rule}, {"k_max", e_kmax}, {"jobs", e_jobs},
                                   {"node_cap", e_node_cap}, {"witness_cap", e_witness_cap},
                                   {"symmetry", !e_no_symmetry}};
            SearchBudget budget;
            budget.jobs = e_jobs;
            budget.node_cap = e_node_cap;
            budget.witness_cap = e_witness_cap;
            budget.symmetry_reduction = !e_no_symmetry;
            return run_extremal(e_d, e_r, e_rule, e_t, e_kmax, budget, manifest);
        }
        if (sim_cmd->parsed() || sub_cmd->parsed()) {
            const bool sub = sub_cmd->parsed();
            TrialPlan& plan = sub ? sub_plan : sim_plan;
            plan.rule = parse_rule(sub ? sub_rule : sim_rule, plan.rule.r);
            plan.seed = resolve_seed(sub ? sub_seed : sim_seed);
            manifest.subcommand = sub ? "subcritical" : "simulate";
            manifest.parameters = plan_to_json(plan);
            manifest.seed = plan.seed;
            return run_simulate(plan, sub ? sub_csv : sim_csv, manifest);
        }
        if (poi_cmd->parsed()) {
            poi_plan.rule = parse_rule(poi_rule, poi_plan.rule.r);
            poi_plan.seed = resolve_seed(poi_seed);
            if (poi_lambda) {
                poi_plan.q = solve_q_for_lambda(poi_plan.d, poi_plan.rule, poi_t, poi_plan.n,
                                                *poi_lambda);
            } else if (poi_cmd->get_option("--q")->count() == 0) {
                throw CLI::ValidationError("poisson", "needs --q or --lambda");
            }
            manifest.subcommand = "poisson";
            manifest.parameters = plan_to_json(poi_plan);
            manifest.parameters["t"] = poi_t;
            if (poi_lambda) manifest.parameters["lambda_target"] = *poi_lambda;
            manifest.seed = poi_plan.seed;
            return run_poisson(poi_plan, poi_t, poi_csv, manifest);
        }
        if (snap_cmd->parsed()) {
            manifest.subcommand = "snapshot";
            manifest.parameters = {{"in", s_in},       {"out", s_out},   {"steps", s_steps},
                                   {"closure", s_closure}, {"new", s_new}};
            std::optional<TrialPlan> init;
            if (s_new) {
                s_plan.rule = parse_rule(s_rule, s_plan.rule.r);
                s_plan.seed = resolve_seed(s_seed);
                manifest.seed = s_plan.seed;
                manifest.parameters["plan"] = plan_to_json(s_plan);
                init = s_plan;
            }
            return run_snapshot(s_in, s_out, s_steps, s_closure, init, s_trial, manifest);
        }
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPropertyViolated;
    }
    return kExitUsage;
}
