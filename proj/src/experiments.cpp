#include "rmdp/experiments.hpp"

#include "rmdp/domains.hpp"
#include "rmdp/freq.hpp"
#include "rmdp/robust.hpp"
#include "rmdp/rsvf.hpp"
#include "rmdp/worstcase.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace rmdp {

std::string to_string(Method method) {
    switch (method) {
    case Method::MeanTransition: return "mean";
    case Method::Hoeffding: return "hoeffding";
    case Method::HoeffdingMonotone: return "hoeffding_monotone";
    case Method::Bci: return "bci";
    case Method::Rsvf: return "rsvf";
    }
    throw std::logic_error("unknown method");
}

Method method_from_string(const std::string& name) {
    for (Method m : all_methods())
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown method: " + name);
}

std::vector<Method> all_methods() {
    return {Method::MeanTransition, Method::Hoeffding, Method::HoeffdingMonotone,
            Method::Bci, Method::Rsvf};
}

prec_t regret(prec_t true_opt, prec_t safe_estimate) {
    if (!std::isfinite(true_opt) || !std::isfinite(safe_estimate))
        throw std::invalid_argument("regret: inputs must be finite");
    return std::abs(true_opt - safe_estimate);
}

std::pair<prec_t, prec_t> wilson_interval(long successes, long trials, prec_t z) {
    if (trials < 1) throw std::invalid_argument("wilson_interval: no trials");
    if (successes < 0 || successes > trials)
        throw std::invalid_argument("wilson_interval: successes out of range");
    const prec_t n = static_cast<prec_t>(trials);
    const prec_t p = static_cast<prec_t>(successes) / n;
    const prec_t z2 = z * z;
    const prec_t denom = 1.0 + z2 / n;
    const prec_t center = (p + z2 / (2.0 * n)) / denom;
    const prec_t radius =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {successes == 0 ? prec_t(0) : std::max(prec_t(0), center - radius),
            successes == trials ? prec_t(1)
                                : std::min(prec_t(1), center + radius)};
}

namespace {

// stream tags for deriving independent per-replication streams
constexpr std::uint64_t TAG_REP = 101;
constexpr std::uint64_t TAG_TRUTH = 1;
constexpr std::uint64_t TAG_DATA = 2;
constexpr std::uint64_t TAG_POSTERIOR = 3;
constexpr std::uint64_t TAG_DISCRETIZE = 4;

// absorbs iterative-solver tolerance so exact-equality cases do not
// register as spurious safety violations
constexpr prec_t VIOLATION_SLACK = 1e-5;

nlohmann::json resolved_domain_config(const ExperimentConfig& config) {
    nlohmann::json merged = default_domain_config(config.domain);
    if (config.domain_config.is_null()) return merged;
    if (!config.domain_config.is_object())
        throw std::invalid_argument("config: domain_config must be an object");
    for (const auto& [key, value] : config.domain_config.items()) {
        if (!merged.contains(key))
            throw std::invalid_argument("config: unknown domain parameter '" + key +
                                        "' for domain " + config.domain);
        merged[key] = value;
    }
    return merged;
}

struct MethodOutcome {
    prec_t safe_return = 0;
    prec_t true_return = 0;
    prec_t true_opt = 0;
};

// ------------------------------------------------------------------
// Single-decision domains: one state-action pair, fixed terminal values
// ------------------------------------------------------------------

struct BellmanReplication {
    numvec truth;               // successor distribution of the true model
    countvec counts;            // frequentist view of the dataset
    std::vector<numvec> draws;  // posterior draws given the dataset
};

struct BellmanRunner {
    numvec values;
    long dim = 0;
    bool inventory = false;
    SingleStateDirichlet dirichlet;
    SingleStateInventory inv;

    static BellmanRunner create(const std::string& id, const nlohmann::json& cfg) {
        BellmanRunner r;
        r.inventory = (id == "single_state_inventory");
        if (r.inventory) {
            r.inv.terminal_values = cfg.at("terminal_values").get<numvec>();
            r.inv.prior_mean = cfg.at("prior_mean").get<prec_t>();
            r.inv.prior_sigma = cfg.at("prior_sigma").get<prec_t>();
            r.inv.demand_sigma = cfg.at("demand_sigma").get<prec_t>();
            r.inv.stock = cfg.at("stock").get<long>();
            r.values = r.inv.terminal_values;
        } else {
            r.dirichlet.terminal_values = cfg.at("terminal_values").get<numvec>();
            r.dirichlet.prior_alpha = cfg.at("prior_alpha").get<numvec>();
            if (r.dirichlet.prior_alpha.size() !=
                r.dirichlet.terminal_values.size())
                throw std::invalid_argument(
                    "config: prior_alpha and terminal_values must have equal length");
            r.values = r.dirichlet.terminal_values;
        }
        r.dim = long(r.values.size());
        return r;
    }

    BellmanReplication replicate(const ExperimentConfig& config, long sample_size,
                                 std::uint64_t base_seed) const {
        BellmanReplication rep;
        const std::uint64_t truth_seed =
            config.fixed_truth ? derive_seed(config.master_seed, {TAG_TRUTH})
                               : derive_seed(base_seed, {TAG_TRUTH});
        RandomEngine truth_gen(truth_seed);
        RandomEngine data_gen = make_engine(base_seed, {TAG_DATA});
        RandomEngine post_gen = make_engine(base_seed, {TAG_POSTERIOR});

        if (inventory) {
            const prec_t mu = inv.sample_truth_mu(truth_gen);
            rep.truth = inv.kernel(mu);
            const numvec demands =
                inv.simulate_demands(mu, sample_size, data_gen);
            rep.counts.assign(dim, 0);
            for (prec_t d : demands) ++rep.counts[inv.demand_to_level(d)];
            rep.draws =
                inv.sample_posterior(demands, config.posterior_samples, post_gen);
        } else {
            rep.truth = dirichlet.sample_truth(truth_gen);
            rep.counts =
                dirichlet.simulate_counts(rep.truth, sample_size, data_gen);
            rep.draws = dirichlet.sample_posterior(
                rep.counts, config.posterior_samples, post_gen);
        }
        return rep;
    }

    MethodOutcome evaluate(const ExperimentConfig& config, Method method,
                           const BellmanReplication& rep) const {
        // one ambiguity set, so the union-bound budget is the full delta
        const ConfidenceBudget budget{config.delta, 1, 1};
        prec_t estimate = 0;
        switch (method) {
        case Method::MeanTransition: {
            numvec mean(dim, 0.0);
            for (const numvec& row : rep.draws)
                for (long i = 0; i < dim; ++i) mean[i] += row[i];
            for (prec_t& x : mean) x /= static_cast<prec_t>(rep.draws.size());
            estimate = dot(mean, values);
            break;
        }
        case Method::Hoeffding:
        case Method::HoeffdingMonotone: {
            long n = 0;
            for (long c : rep.counts) n += c;
            numvec nominal(dim, 1.0 / static_cast<prec_t>(dim));
            if (n > 0)
                for (long i = 0; i < dim; ++i)
                    nominal[i] = static_cast<prec_t>(rep.counts[i]) /
                                 static_cast<prec_t>(n);
            const prec_t psi = (method == Method::Hoeffding)
                                   ? hoeffding_radius(n, budget, dim)
                                   : hoeffding_monotone_radius(n, budget, dim);
            if (config.good_turing && method == Method::Hoeffding) {
                const supportvec mask = good_turing_support(rep.counts);
                estimate = worst_case_l1(values, nominal, psi, mask).objective;
            } else {
                estimate = worst_case_l1(values, nominal, psi).objective;
            }
            break;
        }
        case Method::Bci: {
            const CredibleBall ball = bci_radius(rep.draws, budget.per_pair());
            estimate = worst_case_l1(values, ball.center, ball.psi).objective;
            break;
        }
        case Method::Rsvf: {
            // a single adapted-set iteration with the known value function
            const prec_t zeta = 1.0 - budget.per_pair();
            const prec_t g = quantile_threshold_g(rep.draws, values, zeta);
            const MinimaxCenter center = minimax_center({{values, g, 0, 0}});
            estimate =
                worst_case_l1(values, center.theta, center.psi).objective;
            break;
        }
        }
        const prec_t true_value = dot(rep.truth, values);
        return {estimate, true_value, true_value};
    }
};

// ------------------------------------------------------------------
// Full MDP domains
// ------------------------------------------------------------------

struct MdpReplication {
    TabularMdp truth;
    Dataset data;
    PosteriorSamples samples;
    prec_t true_opt = 0;
};

struct MdpRunner {
    bool population = false;
    TabularMdp river_template;
    prec_t prior_concentration = 1.0;
    PopulationParams pop_params;

    static MdpRunner create(const std::string& id, const nlohmann::json& cfg) {
        MdpRunner r;
        r.population = (id == "population");
        if (r.population) {
            PopulationParams p;
            p.carrying_capacity = cfg.at("carrying_capacity").get<prec_t>();
            p.base_growth = cfg.at("base_growth").get<prec_t>();
            p.beta1 = cfg.at("beta1").get<prec_t>();
            p.beta2 = cfg.at("beta2").get<prec_t>();
            p.threshold = cfg.at("threshold").get<prec_t>();
            p.growth_sigma = cfg.at("growth_sigma").get<prec_t>();
            p.obs_sigma = cfg.at("obs_sigma").get<prec_t>();
            p.bins = cfg.at("bins").get<long>();
            p.start_bin = cfg.at("start_bin").get<long>();
            p.pop_cost = cfg.at("pop_cost").get<prec_t>();
            p.treat_cost = cfg.at("treat_cost").get<prec_t>();
            p.discount = cfg.at("discount").get<prec_t>();
            p.prior_mean = cfg.at("prior_mean").get<prec_t>();
            p.prior_sigma = cfg.at("prior_sigma").get<prec_t>();
            p.mc_steps_kernel = cfg.at("mc_steps_kernel").get<long>();
            p.mc_steps_posterior = cfg.at("mc_steps_posterior").get<long>();
            p.validate();
            r.pop_params = p;
        } else {
            RiverSwimSpec spec;
            spec.num_states = cfg.at("num_states").get<long>();
            spec.discount = cfg.at("discount").get<prec_t>();
            spec.left_reward = cfg.at("left_reward").get<prec_t>();
            spec.right_reward = cfg.at("right_reward").get<prec_t>();
            spec.advance = cfg.at("advance").get<prec_t>();
            spec.stay = cfg.at("stay").get<prec_t>();
            spec.retreat = cfg.at("retreat").get<prec_t>();
            spec.edge_stay = cfg.at("edge_stay").get<prec_t>();
            r.river_template = make_riverswim(spec);
        }
        return r;
    }

    MdpReplication replicate(const ExperimentConfig& config, long sample_size,
                             std::uint64_t base_seed) const {
        MdpReplication rep;
        const std::uint64_t truth_seed =
            config.fixed_truth ? derive_seed(config.master_seed, {TAG_TRUTH})
                               : derive_seed(base_seed, {TAG_TRUTH});

        if (population) {
            const PopulationModel model(pop_params);
            prec_t growth = pop_params.base_growth;
            if (!config.fixed_truth) {
                RandomEngine gen(truth_seed);
                growth = model.sample_truth_growth(gen);
            }
            rep.truth = model.make_mdp(growth, pop_params.mc_steps_kernel,
                                       derive_seed(base_seed, {TAG_DISCRETIZE}));
            rep.data = simulate_dataset(rep.truth, sample_size,
                                        derive_seed(base_seed, {TAG_DATA}));
            rep.samples = model.sample_posterior(
                rep.data, config.posterior_samples,
                derive_seed(base_seed, {TAG_POSTERIOR}));
        } else {
            if (config.fixed_truth) {
                rep.truth = river_template;
            } else {
                const std::vector<std::vector<numvec>> alpha(
                    river_template.num_states,
                    std::vector<numvec>(river_template.num_actions,
                                        numvec(river_template.num_states,
                                               prior_concentration)));
                rep.truth = sample_ground_truth(river_template, alpha, truth_seed);
            }
            rep.data = simulate_dataset(rep.truth, sample_size,
                                        derive_seed(base_seed, {TAG_DATA}));
            rep.samples = sample_posterior(
                dirichlet_posterior(prior_concentration, rep.data),
                config.posterior_samples, derive_seed(base_seed, {TAG_POSTERIOR}));
        }
        rep.true_opt = total_return(value_iteration(rep.truth).value,
                                    rep.truth.initial_dist);
        return rep;
    }

    MethodOutcome evaluate(const ExperimentConfig& config, Method method,
                           const MdpReplication& rep) const {
        const TabularMdp& truth = rep.truth;
        const ConfidenceBudget budget{config.delta, truth.num_states,
                                      truth.num_actions};
        numvec value;
        indexvec policy;
        switch (method) {
        case Method::MeanTransition: {
            const AmbiguitySet sets =
                AmbiguitySet::nominal_only(posterior_mean(rep.samples));
            Solution sol =
                robust_value_iteration(truth.rewards, truth.discount, sets);
            value = std::move(sol.value);
            policy = std::move(sol.policy);
            break;
        }
        case Method::Hoeffding:
        case Method::HoeffdingMonotone: {
            const AmbiguitySet sets = frequentist_set(
                rep.data, budget, method == Method::HoeffdingMonotone,
                config.good_turing && method == Method::Hoeffding);
            Solution sol =
                robust_value_iteration(truth.rewards, truth.discount, sets);
            value = std::move(sol.value);
            policy = std::move(sol.policy);
            break;
        }
        case Method::Bci: {
            const AmbiguitySet sets = bci_ambiguity_set(rep.samples, budget);
            Solution sol =
                robust_value_iteration(truth.rewards, truth.discount, sets);
            value = std::move(sol.value);
            policy = std::move(sol.policy);
            break;
        }
        case Method::Rsvf: {
            RsvfResult res = rsvf_solve(truth.rewards, truth.discount,
                                        truth.initial_dist, rep.samples,
                                        config.delta, config.max_iter);
            value = std::move(res.value);
            policy = std::move(res.policy);
            break;
        }
        }
        MethodOutcome out;
        out.safe_return = total_return(value, truth.initial_dist);
        out.true_return =
            total_return(policy_evaluation(truth, policy), truth.initial_dist);
        out.true_opt = rep.true_opt;
        return out;
    }
};

ReplicationRow make_row(const ExperimentConfig&, Method method, long sample_size,
                        long replication, std::uint64_t seed,
                        const MethodOutcome& outcome) {
    ReplicationRow row;
    row.method = method;
    row.sample_size = sample_size;
    row.replication = replication;
    row.seed = seed;
    row.safe_return = outcome.safe_return;
    row.true_return = outcome.true_return;
    row.true_opt = outcome.true_opt;
    row.regret = regret(outcome.true_opt, outcome.safe_return);
    row.violation = outcome.safe_return > outcome.true_return + VIOLATION_SLACK;
    return row;
}

ReplicationRow failed_row(Method method, long sample_size, long replication,
                          std::uint64_t seed, const std::string& error) {
    ReplicationRow row;
    row.method = method;
    row.sample_size = sample_size;
    row.replication = replication;
    row.seed = seed;
    const prec_t nan = std::numeric_limits<prec_t>::quiet_NaN();
    row.safe_return = row.true_return = row.true_opt = row.regret = nan;
    row.failed = true;
    row.error = error;
    return row;
}

bool is_bellman_domain(const std::string& id) {
    return id == "single_state_dirichlet" || id == "single_state_inventory";
}

}  // namespace

void ExperimentConfig::validate() const {
    const auto ids = builtin_domain_ids();
    if (std::find(ids.begin(), ids.end(), domain) == ids.end())
        throw std::invalid_argument("config: unknown domain '" + domain + "'");
    if (methods.empty()) throw std::invalid_argument("config: no methods selected");
    if (delta <= 0 || delta >= 1)
        throw std::invalid_argument("config: delta must lie in (0,1)");
    if (sample_sizes.empty())
        throw std::invalid_argument("config: no sample sizes given");
    for (long n : sample_sizes)
        if (n < 0) throw std::invalid_argument("config: negative sample size");
    if (replications < 1)
        throw std::invalid_argument("config: replications must be positive");
    if (posterior_samples < 1)
        throw std::invalid_argument("config: posterior_samples must be positive");
    if (max_iter < 1) throw std::invalid_argument("config: max_iter must be positive");
    if (jobs < 1) throw std::invalid_argument("config: jobs must be positive");
    resolved_domain_config(*this);  // throws on unknown domain parameters
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    static const std::vector<std::string> known = {
        "domain",          "methods",  "delta",       "sample_sizes",
        "replications",    "master_seed", "posterior_samples", "max_iter",
        "jobs",            "good_turing", "fixed_truth", "domain_config"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "'");

    ExperimentConfig config;
    config.domain = j.value("domain", config.domain);
    if (j.contains("methods")) {
        config.methods.clear();
        for (const auto& name : j.at("methods"))
            config.methods.push_back(method_from_string(name.get<std::string>()));
    }
    config.delta = j.value("delta", config.delta);
    if (j.contains("sample_sizes"))
        config.sample_sizes = j.at("sample_sizes").get<std::vector<long>>();
    config.replications = j.value("replications", config.replications);
    config.master_seed = j.value("master_seed", config.master_seed);
    config.posterior_samples =
        j.value("posterior_samples", config.posterior_samples);
    config.max_iter = j.value("max_iter", config.max_iter);
    config.jobs = j.value("jobs", config.jobs);
    config.good_turing = j.value("good_turing", config.good_turing);
    config.fixed_truth = j.value("fixed_truth", config.fixed_truth);
    if (j.contains("domain_config")) config.domain_config = j.at("domain_config");
    config.validate();
    config.domain_config = resolved_domain_config(config);
    return config;
}

nlohmann::json ExperimentConfig::to_json() const {
    std::vector<std::string> method_names;
    for (Method m : methods) method_names.push_back(to_string(m));
    return nlohmann::json{{"domain", domain},
                          {"methods", method_names},
                          {"delta", delta},
                          {"sample_sizes", sample_sizes},
                          {"replications", replications},
                          {"master_seed", master_seed},
                          {"posterior_samples", posterior_samples},
                          {"max_iter", max_iter},
                          {"jobs", jobs},
                          {"good_turing", good_turing},
                          {"fixed_truth", fixed_truth},
                          {"domain_config", resolved_domain_config(*this)}};
}

ReplicationRow run_replication(const ExperimentConfig& config, Method method,
                               long sample_size, long replication) {
    config.validate();
    const nlohmann::json cfg = resolved_domain_config(config);
    const std::uint64_t base_seed =
        derive_seed(config.master_seed, {TAG_REP, std::uint64_t(sample_size),
                                         std::uint64_t(replication)});
    try {
        if (is_bellman_domain(config.domain)) {
            const BellmanRunner runner = BellmanRunner::create(config.domain, cfg);
            const BellmanReplication rep =
                runner.replicate(config, sample_size, base_seed);
            return make_row(config, method, sample_size, replication, base_seed,
                            runner.evaluate(config, method, rep));
        }
        const MdpRunner runner = MdpRunner::create(config.domain, cfg);
        const MdpReplication rep = runner.replicate(config, sample_size, base_seed);
        return make_row(config, method, sample_size, replication, base_seed,
                        runner.evaluate(config, method, rep));
    } catch (const std::exception& e) {
        return failed_row(method, sample_size, replication, base_seed, e.what());
    }
}

std::vector<ReplicationRow> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const nlohmann::json cfg = resolved_domain_config(config);
    const long num_sizes = long(config.sample_sizes.size());
    const long num_methods = long(config.methods.size());
    const long num_tasks = num_sizes * config.replications;
    std::vector<ReplicationRow> rows(std::size_t(num_tasks) * num_methods);

    const auto run_task = [&](long task) {
        const long size_ix = task / config.replications;
        const long replication = task % config.replications;
        const long sample_size = config.sample_sizes[size_ix];
        const std::uint64_t base_seed =
            derive_seed(config.master_seed, {TAG_REP, std::uint64_t(sample_size),
                                             std::uint64_t(replication)});
        const std::size_t row0 = std::size_t(task) * num_methods;
        try {
            if (is_bellman_domain(config.domain)) {
                const BellmanRunner runner =
                    BellmanRunner::create(config.domain, cfg);
                const BellmanReplication rep =
                    runner.replicate(config, sample_size, base_seed);
                for (long mi = 0; mi < num_methods; ++mi) {
                    const Method method = config.methods[mi];
                    try {
                        rows[row0 + mi] = make_row(
                            config, method, sample_size, replication, base_seed,
                            runner.evaluate(config, method, rep));
                    } catch (const std::exception& e) {
                        rows[row0 + mi] = failed_row(method, sample_size,
                                                     replication, base_seed,
                                                     e.what());
                    }
                }
            } else {
                const MdpRunner runner = MdpRunner::create(config.domain, cfg);
                const MdpReplication rep =
                    runner.replicate(config, sample_size, base_seed);
                for (long mi = 0; mi < num_methods; ++mi) {
                    const Method method = config.methods[mi];
                    try {
                        rows[row0 + mi] = make_row(
                            config, method, sample_size, replication, base_seed,
                            runner.evaluate(config, method, rep));
                    } catch (const std::exception& e) {
                        rows[row0 + mi] = failed_row(method, sample_size,
                                                     replication, base_seed,
                                                     e.what());
                    }
                }
            }
        } catch (const std::exception& e) {
            for (long mi = 0; mi < num_methods; ++mi)
                rows[row0 + mi] = failed_row(config.methods[mi], sample_size,
                                             replication, base_seed, e.what());
        }
    };

    const long workers = std::min<long>(config.jobs, num_tasks);
    if (workers <= 1) {
        for (long t = 0; t < num_tasks; ++t) run_task(t);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (long w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (long t = next++; t < num_tasks; t = next++) run_task(t);
            });
        }
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<ReplicationRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate: no rows");
    std::vector<AggregateRow> out;
    const auto find_cell = [&](Method method, long size) -> AggregateRow& {
        for (AggregateRow& c : out)
            if (c.method == method && c.sample_size == size) return c;
        out.push_back({method, size, 0, 0, 0, 0, 0});
        return out.back();
    };

    for (const ReplicationRow& row : rows) {
        if (row.failed) continue;
        AggregateRow& cell = find_cell(row.method, row.sample_size);
        cell.mean_regret += row.regret;
        ++cell.count;
        cell.violation_rate += row.violation ? 1.0 : 0.0;
    }
    for (AggregateRow& cell : out) {
        if (cell.count == 0) continue;
        cell.mean_regret /= static_cast<prec_t>(cell.count);
        const long k = std::lround(cell.violation_rate);
        cell.violation_rate = static_cast<prec_t>(k) /
                              static_cast<prec_t>(cell.count);
        std::tie(cell.wilson_low, cell.wilson_high) =
            wilson_interval(k, cell.count);
    }
    return out;
}

}  // namespace rmdp
