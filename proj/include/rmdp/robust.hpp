#pragma once

#include "rmdp/ambiguity.hpp"
#include "rmdp/mdp.hpp"

#include <optional>

namespace rmdp {

/// One robust Bellman update: per state-action pair nature picks the
/// worst distribution from the L1 ball, then the maximizing action is
/// taken (lowest index on ties).
std::pair<numvec, indexvec> robust_bellman_backup(
    const std::vector<numvec>& rewards, prec_t gamma, const AmbiguitySet& sets,
    const numvec& v);

/// Fixed point of the robust Bellman operator, accurate to `tol` in the
/// sup norm (same stopping rule as value_iteration).
Solution robust_value_iteration(const std::vector<numvec>& rewards, prec_t gamma,
                                const AmbiguitySet& sets, prec_t tol = DEFAULT_TOL);

/// Robust value of a fixed deterministic policy.
numvec robust_policy_evaluation(const std::vector<numvec>& rewards, prec_t gamma,
                                const AmbiguitySet& sets, const indexvec& policy,
                                prec_t tol = DEFAULT_TOL);

/// Worst-case return p0 . v_hat, either of a fixed policy or of the
/// optimal robust policy when none is given.
prec_t robust_return(const std::vector<numvec>& rewards, prec_t gamma,
                     const AmbiguitySet& sets, const std::optional<indexvec>& policy,
                     const numvec& initial_dist, prec_t tol = DEFAULT_TOL);

}  // namespace rmdp
