#pragma once

#include "rmdp/definitions.hpp"

#include <utility>

namespace rmdp {

/// A tabular MDP with dense transition probabilities.
///
/// Conventions: states and actions are 0-based contiguous indices,
/// rewards depend on state and action only, and the discount factor is
/// strictly below one.
struct TabularMdp {
    long num_states = 0;
    long num_actions = 0;
    std::vector<numvec> rewards;                   // [s][a]
    std::vector<std::vector<numvec>> transitions;  // [s][a][s']
    prec_t discount = 0.0;
    numvec initial_dist;

    /// Throws std::invalid_argument when dimensions or stochasticity
    /// invariants are violated.
    void validate() const;
};

struct TransitionSample {
    long s = 0;
    long a = 0;
    long sprime = 0;
};

/// A batch of transition samples with per-(s,a) counts derived from them.
struct Dataset {
    long num_states = 0;
    long num_actions = 0;
    std::vector<TransitionSample> samples;
    std::vector<countvec> n;                 // [s][a], total visits
    std::vector<std::vector<countvec>> c;    // [s][a][s'], successor counts

    static Dataset from_samples(std::vector<TransitionSample> samples,
                                long num_states, long num_actions);

    void add(long s, long a, long sprime);
    bool empty() const { return samples.empty(); }
};

/// Solution of a (robust) dynamic program.
struct Solution {
    numvec value;
    indexvec policy;
    prec_t residual = 0;
    long iterations = 0;
};

/// Per-(s,a) empirical transition probabilities c/n. Pairs without any
/// sample get the uniform distribution: with no information the set
/// construction later blows the radius up to the full simplex anyway.
std::vector<std::vector<numvec>> empirical_model(const Dataset& dataset,
                                                 long num_states,
                                                 long num_actions);

/// One Bellman update v'(s) = max_a (r[s][a] + gamma p[s][a].v) with the
/// greedy action recorded. Ties go to the lowest action index.
std::pair<numvec, indexvec> bellman_backup(const TabularMdp& mdp, const numvec& v);

/// Value iteration to within `tol` of the optimal value function in the
/// sup norm. The iteration stops when the Bellman residual drops below
/// tol (1-gamma) / (2 gamma).
Solution value_iteration(const TabularMdp& mdp, prec_t tol = DEFAULT_TOL);

/// Exact policy evaluation by solving (I - gamma P_pi) v = r_pi directly.
numvec policy_evaluation(const TabularMdp& mdp, const indexvec& policy);

/// rho = p0 . v
prec_t total_return(const numvec& v, const numvec& initial_dist);

}  // namespace rmdp
