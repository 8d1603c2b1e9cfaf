// Command-line front end: solve a robust MDP from logged data, run the
// replication experiments from a config file, or list built-in domains.

#include "rmdp/domains.hpp"
#include "rmdp/freq.hpp"
#include "rmdp/io.hpp"
#include "rmdp/robust.hpp"
#include "rmdp/rsvf.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

namespace {

constexpr int EXIT_USAGE = 1;
constexpr int EXIT_INPUT = 2;
constexpr int EXIT_SOLVER = 3;

struct SolveOptions {
    std::string mdp_path;
    std::string data_path;
    std::string posterior_path;
    std::string method = "bci";
    std::string output_path;
    double delta = 0.05;
    std::uint64_t seed = 1;
    long samples = 1000;
    long max_iter = 20;
    double prior_alpha = 1.0;
    double tol = rmdp::DEFAULT_TOL;
    bool good_turing = false;
};

struct ExperimentOptions {
    std::string config_path;
    std::string output_prefix = "results";
    long jobs = 0;  // 0: take the value from the config
};

int run_solve(const SolveOptions& opt) {
    using namespace rmdp;

    Method method;
    TabularMdp mdp;
    Dataset data;
    PosteriorSamples samples;
    bool have_data = false, have_samples = false;
    try {
        method = method_from_string(opt.method);
        mdp = io::load_mdp(opt.mdp_path);
        if (!opt.data_path.empty()) {
            data = io::load_dataset(opt.data_path, mdp.num_states, mdp.num_actions);
            have_data = true;
        }
        if (!opt.posterior_path.empty()) {
            samples = io::ingest_posterior_samples(opt.posterior_path);
            if (samples.num_states != mdp.num_states ||
                samples.num_actions > mdp.num_actions)
                throw std::runtime_error(
                    "posterior samples do not match the MDP dimensions");
            have_samples = true;
        }
        const bool bayesian = method == Method::Bci || method == Method::Rsvf;
        if (!have_data && !have_samples)
            throw std::runtime_error("need --data or --posterior");
        if (!bayesian && method != Method::MeanTransition && !have_data)
            throw std::runtime_error("method '" + opt.method + "' needs --data");
        if (bayesian && !have_samples) {
            // conjugate fallback: flat Dirichlet prior updated with the data
            samples = sample_posterior(dirichlet_posterior(opt.prior_alpha, data),
                                       opt.samples, opt.seed);
            have_samples = true;
        }
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return EXIT_INPUT;
    }

    nlohmann::json out;
    try {
        const ConfidenceBudget budget{opt.delta, mdp.num_states, mdp.num_actions};
        AmbiguitySet sets;
        numvec value;
        indexvec policy;
        switch (method) {
        case Method::MeanTransition:
            sets = AmbiguitySet::nominal_only(
                have_samples ? posterior_mean(samples)
                             : empirical_model(data, mdp.num_states,
                                               mdp.num_actions));
            break;
        case Method::Hoeffding:
        case Method::HoeffdingMonotone:
            sets = frequentist_set(data, budget,
                                   method == Method::HoeffdingMonotone,
                                   opt.good_turing);
            break;
        case Method::Bci:
            sets = bci_ambiguity_set(samples, budget);
            break;
        case Method::Rsvf:
            break;  // rsvf_solve constructs its own sets
        }
        if (method == Method::Rsvf) {
            RsvfResult res =
                rsvf_solve(mdp.rewards, mdp.discount, mdp.initial_dist, samples,
                           opt.delta, opt.max_iter, opt.tol);
            value = std::move(res.value);
            policy = std::move(res.policy);
            sets = std::move(res.sets);
            out["diagnostics"] = io::diagnostics_to_json(res.diagnostics);
        } else {
            Solution sol =
                robust_value_iteration(mdp.rewards, mdp.discount, sets, opt.tol);
            value = std::move(sol.value);
            policy = std::move(sol.policy);
        }
        out["method"] = opt.method;
        out["delta"] = opt.delta;
        out["seed"] = opt.seed;
        out["safe_return"] = total_return(value, mdp.initial_dist);
        out["value"] = value;
        out["policy"] = policy;
        out["ambiguity"] = io::ambiguity_to_json(sets);
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return EXIT_SOLVER;
    }

    if (opt.output_path.empty()) {
        std::cout << out.dump(2) << '\n';
    } else {
        std::ofstream file(opt.output_path);
        if (!file) {
            std::cerr << "input error: cannot write " << opt.output_path << '\n';
            return EXIT_INPUT;
        }
        file << out.dump(2) << '\n';
    }
    return 0;
}

int run_experiment_cmd(const ExperimentOptions& opt) {
    using namespace rmdp;

    ExperimentConfig config;
    try {
        nlohmann::json j;
        std::ifstream in(opt.config_path);
        if (!in) throw std::runtime_error("cannot open " + opt.config_path);
        in >> j;
        config = ExperimentConfig::from_json(j);
        if (opt.jobs > 0) config.jobs = opt.jobs;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return EXIT_INPUT;
    }

    const std::vector<ReplicationRow> rows = run_experiment(config);
    const std::vector<AggregateRow> agg = aggregate(rows);

    try {
        io::save_replication_csv(rows, opt.output_prefix + "_replications.csv");
        io::save_aggregate_csv(agg, opt.output_prefix + "_aggregate.csv");
        std::ofstream cfg(opt.output_prefix + "_config.json");
        if (!cfg) throw std::runtime_error("cannot write config echo");
        cfg << config.to_json().dump(2) << '\n';
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << '\n';
        return EXIT_INPUT;
    }

    long failures = 0;
    for (const auto& row : rows) failures += row.failed ? 1 : 0;
    if (failures > 0)
        std::cerr << "warning: " << failures << " of " << rows.size()
                  << " rows failed; see the replication CSV\n";

    std::cout << std::left << std::setw(20) << "method" << std::setw(14)
              << "sample_size" << std::setw(16) << "mean_regret" << std::setw(16)
              << "violation_rate" << '\n';
    for (const AggregateRow& row : agg) {
        std::cout << std::left << std::setw(20) << to_string(row.method)
                  << std::setw(14) << row.sample_size << std::setw(16)
                  << row.mean_regret << std::setw(16) << row.violation_rate
                  << '\n';
    }
    return 0;
}

int run_domains(bool as_json) {
    using namespace rmdp;
    if (as_json) {
        nlohmann::json j;
        for (const std::string& id : builtin_domain_ids())
            j[id] = default_domain_config(id);
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    for (const std::string& id : builtin_domain_ids()) {
        std::cout << id << '\n';
        const nlohmann::json cfg = default_domain_config(id);
        for (const auto& [key, value] : cfg.items())
            std::cout << "  " << key << " = " << value.dump() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust MDP policies with high-confidence return estimates"};
    app.require_subcommand(1);

    SolveOptions solve_opt;
    CLI::App* solve = app.add_subcommand(
        "solve", "Compute a robust policy and its safe return estimate");
    solve->add_option("--mdp", solve_opt.mdp_path, "MDP model (JSON)")->required();
    solve->add_option("--data", solve_opt.data_path,
                      "Transition samples (CSV: s,a,sprime)");
    solve->add_option("--posterior", solve_opt.posterior_path,
                      "External posterior draws (CSV: s,a,sample_index,p0,...)");
    solve->add_option("--method", solve_opt.method,
                      "mean|hoeffding|hoeffding_monotone|bci|rsvf");
    solve->add_option("--delta", solve_opt.delta, "Confidence budget");
    solve->add_option("--seed", solve_opt.seed, "Master seed");
    solve->add_option("--samples", solve_opt.samples,
                      "Posterior draws per state-action pair");
    solve->add_option("--max-iter", solve_opt.max_iter,
                      "Adapted-set iteration cap");
    solve->add_option("--prior-alpha", solve_opt.prior_alpha,
                      "Dirichlet prior concentration");
    solve->add_option("--tol", solve_opt.tol, "Solver tolerance");
    solve->add_flag("--good-turing", solve_opt.good_turing,
                    "Restrict Hoeffding sets to observed successors");
    solve->add_option("--output", solve_opt.output_path,
                      "Write the result JSON here instead of stdout");

    ExperimentOptions exp_opt;
    CLI::App* experiment = app.add_subcommand(
        "experiment", "Run a replication experiment from a config file");
    experiment->add_option("--config", exp_opt.config_path, "Config JSON")
        ->required();
    experiment->add_option("--output", exp_opt.output_prefix,
                           "Output path prefix for the CSV files");
    experiment->add_option("--jobs", exp_opt.jobs, "Worker threads");

    bool domains_json = false;
    CLI::App* domains =
        app.add_subcommand("domains", "List built-in domains and defaults");
    domains->add_flag("--json", domains_json, "Machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return EXIT_USAGE;
    }

    try {
        if (solve->parsed()) return run_solve(solve_opt);
        if (experiment->parsed()) return run_experiment_cmd(exp_opt);
        if (domains->parsed()) return run_domains(domains_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_SOLVER;
    }
    return EXIT_USAGE;
}
