#include "rmdp/robust.hpp"

#include "rmdp/worstcase.hpp"

#include <stdexcept>

namespace rmdp {

namespace {

void check_shapes(const std::vector<numvec>& rewards, prec_t gamma,
                  const AmbiguitySet& sets, std::size_t value_len) {
    if (long(rewards.size()) != sets.num_states)
        throw std::invalid_argument("robust: rewards state count mismatch");
    for (const auto& row : rewards)
        if (long(row.size()) != sets.num_actions)
            throw std::invalid_argument("robust: rewards action count mismatch");
    if (gamma < 0 || gamma >= 1.0)
        throw std::invalid_argument("robust: discount must lie in [0,1)");
    if (long(value_len) != sets.num_states)
        throw std::invalid_argument("robust: value function length mismatch");
}

prec_t worst_objective(const AmbiguitySet& sets, long s, long a, const numvec& v) {
    if (sets.has_support())
        return worst_case_l1(v, sets.nominal[s][a], sets.psi[s][a],
                             sets.support[s][a])
            .objective;
    return worst_case_l1(v, sets.nominal[s][a], sets.psi[s][a]).objective;
}

prec_t stopping_residual(prec_t tol, prec_t gamma) {
    if (gamma <= 0) return std::numeric_limits<prec_t>::infinity();
    return tol * (1.0 - gamma) / (2.0 * gamma);
}

constexpr long MAX_SWEEPS = 2000000;

}  // namespace

std::pair<numvec, indexvec> robust_bellman_backup(
    const std::vector<numvec>& rewards, prec_t gamma, const AmbiguitySet& sets,
    const numvec& v) {
    check_shapes(rewards, gamma, sets, v.size());
    numvec vnew(sets.num_states);
    indexvec policy(sets.num_states, 0);
    for (long s = 0; s < sets.num_states; ++s) {
        prec_t best = -std::numeric_limits<prec_t>::infinity();
        long best_a = 0;
        for (long a = 0; a < sets.num_actions; ++a) {
            const prec_t qa =
                rewards[s][a] + gamma * worst_objective(sets, s, a, v);
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

Solution robust_value_iteration(const std::vector<numvec>& rewards, prec_t gamma,
                                const AmbiguitySet& sets, prec_t tol) {
    if (tol <= 0)
        throw std::invalid_argument("robust_value_iteration: tol must be positive");
    const prec_t stop = stopping_residual(tol, gamma);

    Solution sol;
    sol.value.assign(sets.num_states, 0.0);
    for (long it = 0; it < MAX_SWEEPS; ++it) {
        auto [vnew, policy] = robust_bellman_backup(rewards, gamma, sets, sol.value);
        sol.residual = linf_distance(vnew, sol.value);
        sol.value = std::move(vnew);
        sol.policy = std::move(policy);
        sol.iterations = it + 1;
        if (sol.residual <= stop) return sol;
    }
    throw std::runtime_error("robust_value_iteration: did not converge");
}

numvec robust_policy_evaluation(const std::vector<numvec>& rewards, prec_t gamma,
                                const AmbiguitySet& sets, const indexvec& policy,
                                prec_t tol) {
    if (tol <= 0)
        throw std::invalid_argument("robust_policy_evaluation: tol must be positive");
    if (long(policy.size()) != sets.num_states)
        throw std::invalid_argument("robust_policy_evaluation: policy length mismatch");
    check_shapes(rewards, gamma, sets, policy.size());
    const prec_t stop = stopping_residual(tol, gamma);

    numvec v(sets.num_states, 0.0);
    for (long it = 0; it < MAX_SWEEPS; ++it) {
        numvec vnew(sets.num_states);
        for (long s = 0; s < sets.num_states; ++s) {
            const long a = policy[s];
            if (a < 0 || a >= sets.num_actions)
                throw std::invalid_argument(
                    "robust_policy_evaluation: action out of range");
            vnew[s] = rewards[s][a] + gamma * worst_objective(sets, s, a, v);
        }
        const prec_t residual = linf_distance(vnew, v);
        v = std::move(vnew);
        if (residual <= stop) return v;
    }
    throw std::runtime_error("robust_policy_evaluation: did not converge");
}

prec_t robust_return(const std::vector<numvec>& rewards, prec_t gamma,
                     const AmbiguitySet& sets, const std::optional<indexvec>& policy,
                     const numvec& initial_dist, prec_t tol) {
    const numvec value =
        policy ? robust_policy_evaluation(rewards, gamma, sets, *policy, tol)
               : robust_value_iteration(rewards, gamma, sets, tol).value;
    return total_return(value, initial_dist);
}

}  // namespace rmdp
