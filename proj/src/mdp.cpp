#include "rmdp/mdp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace rmdp {

void TabularMdp::validate() const {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("mdp: needs at least one state and action");
    if (discount < 0 || discount >= 1.0)
        throw std::invalid_argument("mdp: discount must lie in [0,1)");
    if (long(rewards.size()) != num_states || long(transitions.size()) != num_states)
        throw std::invalid_argument("mdp: rewards/transitions have wrong state count");
    for (long s = 0; s < num_states; ++s) {
        if (long(rewards[s].size()) != num_actions ||
            long(transitions[s].size()) != num_actions)
            throw std::invalid_argument("mdp: wrong action count in state " +
                                        std::to_string(s));
        for (long a = 0; a < num_actions; ++a) {
            if (long(transitions[s][a].size()) != num_states)
                throw std::invalid_argument("mdp: transition row has wrong length");
            check_probability_vector(transitions[s][a],
                                     "mdp: transitions[" + std::to_string(s) + "][" +
                                         std::to_string(a) + "]");
        }
    }
    if (long(initial_dist.size()) != num_states)
        throw std::invalid_argument("mdp: initial distribution has wrong length");
    check_probability_vector(initial_dist, "mdp: initial_dist");
}

Dataset Dataset::from_samples(std::vector<TransitionSample> samples,
                              long num_states, long num_actions) {
    Dataset d;
    d.num_states = num_states;
    d.num_actions = num_actions;
    d.n.assign(num_states, countvec(num_actions, 0));
    d.c.assign(num_states,
               std::vector<countvec>(num_actions, countvec(num_states, 0)));
    for (const auto& t : samples) d.add(t.s, t.a, t.sprime);
    return d;
}

void Dataset::add(long s, long a, long sprime) {
    if (s < 0 || s >= num_states || sprime < 0 || sprime >= num_states || a < 0 ||
        a >= num_actions)
        throw std::invalid_argument("dataset: sample index out of range");
    samples.push_back({s, a, sprime});
    ++n[s][a];
    ++c[s][a][sprime];
}

std::vector<std::vector<numvec>> empirical_model(const Dataset& dataset,
                                                 long num_states,
                                                 long num_actions) {
    if (dataset.num_states > num_states || dataset.num_actions > num_actions)
        throw std::invalid_argument("empirical_model: dataset does not fit");
    std::vector<std::vector<numvec>> model(
        num_states, std::vector<numvec>(num_actions, numvec(num_states, 0.0)));
    for (long s = 0; s < num_states; ++s) {
        for (long a = 0; a < num_actions; ++a) {
            const long total = (s < dataset.num_states && a < dataset.num_actions)
                                   ? dataset.n[s][a]
                                   : 0;
            if (total == 0) {
                std::fill(model[s][a].begin(), model[s][a].end(),
                          1.0 / static_cast<prec_t>(num_states));
                continue;
            }
            for (long sp = 0; sp < dataset.num_states; ++sp)
                model[s][a][sp] = static_cast<prec_t>(dataset.c[s][a][sp]) /
                                  static_cast<prec_t>(total);
        }
    }
    return model;
}

std::pair<numvec, indexvec> bellman_backup(const TabularMdp& mdp, const numvec& v) {
    if (long(v.size()) != mdp.num_states)
        throw std::invalid_argument("bellman_backup: value function length mismatch");
    numvec vnew(mdp.num_states);
    indexvec policy(mdp.num_states, 0);
    for (long s = 0; s < mdp.num_states; ++s) {
        prec_t best = -std::numeric_limits<prec_t>::infinity();
        long best_a = 0;
        for (long a = 0; a < mdp.num_actions; ++a) {
            const prec_t qa =
                mdp.rewards[s][a] + mdp.discount * dot(mdp.transitions[s][a], v);
            if (qa > best) {
                best = qa;
                best_a = a;
            }
        }
        vnew[s] = best;
        policy[s] = best_a;
    }
    return {std::move(vnew), std::move(policy)};
}

namespace {

/// Residual threshold that turns the contraction bound into a tol-accurate
/// value function.
prec_t stopping_residual(prec_t tol, prec_t gamma) {
    if (gamma <= 0) return std::numeric_limits<prec_t>::infinity();
    return tol * (1.0 - gamma) / (2.0 * gamma);
}

}  // namespace

Solution value_iteration(const TabularMdp& mdp, prec_t tol) {
    if (tol <= 0) throw std::invalid_argument("value_iteration: tol must be positive");
    const prec_t stop = stopping_residual(tol, mdp.discount);
    constexpr long max_sweeps = 2000000;

    Solution sol;
    sol.value.assign(mdp.num_states, 0.0);
    for (long it = 0; it < max_sweeps; ++it) {
        auto [vnew, policy] = bellman_backup(mdp, sol.value);
        sol.residual = linf_distance(vnew, sol.value);
        sol.value = std::move(vnew);
        sol.policy = std::move(policy);
        sol.iterations = it + 1;
        if (sol.residual <= stop) return sol;
    }
    throw std::runtime_error("value_iteration: did not converge");
}

numvec policy_evaluation(const TabularMdp& mdp, const indexvec& policy) {
    if (long(policy.size()) != mdp.num_states)
        throw std::invalid_argument("policy_evaluation: policy length mismatch");
    const long n = mdp.num_states;
    Eigen::MatrixXd system(n, n);
    Eigen::VectorXd reward(n);
    for (long s = 0; s < n; ++s) {
        const long a = policy[s];
        if (a < 0 || a >= mdp.num_actions)
            throw std::invalid_argument("policy_evaluation: action out of range");
        for (long sp = 0; sp < n; ++sp)
            system(s, sp) = (s == sp ? 1.0 : 0.0) -
                            mdp.discount * mdp.transitions[s][a][sp];
        reward(s) = mdp.rewards[s][a];
    }
    const Eigen::VectorXd solution = system.partialPivLu().solve(reward);
    const prec_t residual = (system * solution - reward).lpNorm<Eigen::Infinity>();
    if (residual > 1e-9)
        throw std::runtime_error("policy_evaluation: linear solve residual " +
                                 std::to_string(residual));
    return numvec(solution.data(), solution.data() + n);
}

prec_t total_return(const numvec& v, const numvec& initial_dist) {
    if (v.size() != initial_dist.size())
        throw std::invalid_argument("total_return: length mismatch");
    check_probability_vector(initial_dist, "total_return: initial_dist", 1e-9);
    return dot(v, initial_dist);
}

}  // namespace rmdp
