#pragma once

#include "rmdp/mdp.hpp"
#include "rmdp/posterior.hpp"
#include "rmdp/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace rmdp {

/// Draws a transition kernel row-by-row from independent Dirichlet
/// priors; rewards, discount and initial distribution come from the
/// template model.
TabularMdp sample_ground_truth(const TabularMdp& template_mdp,
                               const std::vector<std::vector<numvec>>& prior_alpha,
                               std::uint64_t seed);

/// Simulates `per_pair_count` successor draws from every state-action
/// pair of the true model, so each state contributes the same number of
/// samples.
Dataset simulate_dataset(const TabularMdp& truth, long per_pair_count,
                         std::uint64_t seed);

// ---------------------------------------------------------------------
// RiverSwim: a 6-state chain where swimming right against the current
// succeeds rarely but pays a large reward at the far end.
// ---------------------------------------------------------------------

struct RiverSwimSpec {
    long num_states = 6;
    prec_t discount = 0.95;
    prec_t left_reward = 5.0;       // staying at the near bank
    prec_t right_reward = 10000.0;  // reaching the far bank
    prec_t advance = 0.3;           // right action, interior states
    prec_t stay = 0.6;
    prec_t retreat = 0.1;
    prec_t edge_stay = 0.7;         // right action at either bank
};

/// Canonical RiverSwim model; action 0 swims left (deterministic),
/// action 1 swims right. The initial distribution is the left bank.
TabularMdp make_riverswim(const RiverSwimSpec& spec = {});

// ---------------------------------------------------------------------
// Single-decision evaluation problems: one state-action pair
// transitioning into a handful of terminal states with fixed values.
// ---------------------------------------------------------------------

/// Terminal values (1,...,5) with an uninformative Dirichlet prior over
/// the successor distribution.
struct SingleStateDirichlet {
    numvec terminal_values{1, 2, 3, 4, 5};
    numvec prior_alpha{1, 1, 1, 1, 1};

    long dim() const { return long(terminal_values.size()); }
    numvec sample_truth(RandomEngine& gen) const;
    countvec simulate_counts(const numvec& truth, long n, RandomEngine& gen) const;
    numvec posterior_alpha(const countvec& counts) const;
    std::vector<numvec> sample_posterior(const countvec& counts, long m,
                                         RandomEngine& gen) const;
};

/// Inventory variant: successor states are stock levels after Normally
/// distributed demand with unknown mean is subtracted from the current
/// stock of five units. The demand mean carries a conjugate Normal prior.
struct SingleStateInventory {
    numvec terminal_values{1, 2, 3, 4, 5};
    prec_t prior_mean = 3.0;    // mu0
    prec_t prior_sigma = 1.0;   // sigma0
    prec_t demand_sigma = 1.0;  // known observation noise
    long stock = 5;

    long dim() const { return long(terminal_values.size()); }

    /// Successor distribution over stock levels for demand mean mu.
    numvec kernel(prec_t mu) const;
    /// Stock level (0-based) reached after observing demand d; demand
    /// beyond the available stock clamps at the lowest level.
    long demand_to_level(prec_t demand) const;

    prec_t sample_truth_mu(RandomEngine& gen) const;
    numvec simulate_demands(prec_t mu, long n, RandomEngine& gen) const;
    /// Conjugate update; returns posterior (mean, stdev) of mu.
    std::pair<prec_t, prec_t> posterior(const numvec& demands) const;
    std::vector<numvec> sample_posterior(const numvec& demands, long m,
                                         RandomEngine& gen) const;
};

SingleStateDirichlet make_single_state_dirichlet();
SingleStateInventory make_single_state_inventory();

// ---------------------------------------------------------------------
// Exponential population growth with a treatment decision. The state is
// a noisy population observation discretized to 20 bins; the unknown
// quantity is the base growth rate with a conjugate Normal model.
// ---------------------------------------------------------------------

struct PopulationParams {
    prec_t carrying_capacity = 100.0;  // K
    prec_t base_growth = 1.25;         // growth-rate used for the template
    prec_t beta1 = 0.004;              // linear treatment coefficient
    prec_t beta2 = 5e-5;               // quadratic coefficient above threshold
    prec_t threshold = 40.0;           // N-bar
    prec_t growth_sigma = 0.1;
    prec_t obs_sigma = 0.1;
    long bins = 20;
    long actions = 2;  // 0 = no treatment, 1 = treatment
    long start_bin = 9;  // initial population near the treatment threshold
    prec_t pop_cost = 0.05;
    prec_t treat_cost = 2.0;
    prec_t discount = 0.9;
    prec_t prior_mean = 1.25;  // Normal prior over the base growth rate
    prec_t prior_sigma = 0.1;
    long mc_steps_kernel = 100000;   // discretization draws for the template
    long mc_steps_posterior = 1000;  // discretization draws per posterior sample

    void validate() const;
};

class PopulationModel {
  public:
    explicit PopulationModel(PopulationParams params);

    const PopulationParams& params() const { return params_; }
    prec_t midpoint(long bin) const;

    /// Transition row for one bin and action, estimated from mc_steps
    /// simulated steps of the continuous dynamics.
    numvec kernel_row(prec_t growth, long bin, long action, long mc_steps,
                      RandomEngine& gen) const;

    /// Full discretized MDP for a fixed base growth rate.
    TabularMdp make_mdp(prec_t growth, long mc_steps, std::uint64_t seed) const;

    prec_t sample_truth_growth(RandomEngine& gen) const;

    /// Conjugate Normal update over the base growth rate from binned
    /// transition samples (top-bin arrivals are dropped: the capacity
    /// clamp censors the observed growth there).
    std::pair<prec_t, prec_t> posterior(const Dataset& data) const;

    PosteriorSamples sample_posterior(const Dataset& data, long m,
                                      std::uint64_t seed) const;

  private:
    PopulationParams params_;
};

PopulationModel make_population(const PopulationParams& params = {});

// ---------------------------------------------------------------------
// Registry used by the command line and the experiment harness.
// ---------------------------------------------------------------------

std::vector<std::string> builtin_domain_ids();
nlohmann::json default_domain_config(const std::string& id);

}  // namespace rmdp
