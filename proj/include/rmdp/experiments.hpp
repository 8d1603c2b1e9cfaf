#pragma once

#include "rmdp/definitions.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace rmdp {

/// Safe-estimate construction methods compared by the harness.
enum class Method { MeanTransition, Hoeffding, HoeffdingMonotone, Bci, Rsvf };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
std::vector<Method> all_methods();

/// Full description of one experiment: which domain, which methods,
/// the confidence budget and the replication protocol. Everything that
/// influences the results is in here, so a config plus a master seed
/// reproduces a run exactly.
struct ExperimentConfig {
    std::string domain = "single_state_dirichlet";
    std::vector<Method> methods = all_methods();
    prec_t delta = 0.05;
    std::vector<long> sample_sizes = {5, 10, 20, 50, 100, 200};
    long replications = 200;
    std::uint64_t master_seed = 1;
    long posterior_samples = 1000;  // m
    long max_iter = 20;             // adapted-set iteration cap
    long jobs = 1;
    bool good_turing = false;   // restrict Hoeffding sets to observed successors
    bool fixed_truth = false;   // frequentist protocol: one ground truth throughout
    nlohmann::json domain_config;  // resolved domain constants

    /// Strict parse: unknown keys and wrong types are errors; domain
    /// constants are merged over the built-in defaults.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

struct ReplicationRow {
    Method method = Method::MeanTransition;
    long sample_size = 0;
    long replication = 0;
    std::uint64_t seed = 0;
    prec_t safe_return = 0;
    prec_t true_return = 0;  // return of the computed policy under the truth
    prec_t true_opt = 0;     // optimal return under the truth
    prec_t regret = 0;
    bool violation = false;
    bool failed = false;
    std::string error;
};

struct AggregateRow {
    Method method = Method::MeanTransition;
    long sample_size = 0;
    long count = 0;
    prec_t mean_regret = 0;
    prec_t violation_rate = 0;
    prec_t wilson_low = 0;
    prec_t wilson_high = 0;
};

/// xi = |rho(pi*, P*) - rho~|
prec_t regret(prec_t true_opt, prec_t safe_estimate);

/// Wilson score interval for a binomial proportion.
std::pair<prec_t, prec_t> wilson_interval(long successes, long trials,
                                          prec_t z = 1.959963984540054);

/// Runs one (method, sample size, replication) cell. Dataset, ground
/// truth and posterior draws depend only on (master seed, sample size,
/// replication), so different methods see identical inputs.
ReplicationRow run_replication(const ExperimentConfig& config, Method method,
                               long sample_size, long replication);

/// Runs the full grid on a small worker pool; rows come back in
/// deterministic order (sample size, replication, method).
std::vector<ReplicationRow> run_experiment(const ExperimentConfig& config);

/// Per (method, sample size): mean regret and the violation rate with a
/// 95% Wilson interval. Failed rows are excluded.
std::vector<AggregateRow> aggregate(const std::vector<ReplicationRow>& rows);

}  // namespace rmdp
