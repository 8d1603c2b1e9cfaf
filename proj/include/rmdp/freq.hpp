#pragma once

#include "rmdp/ambiguity.hpp"
#include "rmdp/mdp.hpp"

namespace rmdp {

/// Overall confidence budget 1-delta split uniformly over all
/// state-action pairs.
struct ConfidenceBudget {
    prec_t delta = 0.05;
    long num_states = 1;
    long num_actions = 1;

    prec_t per_pair() const {
        return delta / (static_cast<prec_t>(num_states) *
                        static_cast<prec_t>(num_actions));
    }
};

/// Distribution-free L1 radius from the Hoeffding inequality and a union
/// bound over the 2^dim half-spaces of the L1 ball:
///     min(2, sqrt(2/n log(S A 2^dim / delta)))
/// `dim` is the successor-state count and defaults to budget.num_states.
/// With no samples the radius is the simplex diameter 2.
prec_t hoeffding_radius(long n, const ConfidenceBudget& budget, long dim = -1);

/// Tighter radius valid for nonincreasing value functions; the union
/// bound runs over dim band constraints instead of 2^dim half-spaces:
///     min(2, sqrt(2/n log(S A dim / delta)))
prec_t hoeffding_monotone_radius(long n, const ConfidenceBudget& budget,
                                 long dim = -1);

/// Marks successor states with at least one observed transition; with no
/// data at all every state stays plausible.
supportvec good_turing_support(const countvec& counts);

/// Assembles the frequentist ambiguity set: empirical nominal points
/// (uniform for unvisited pairs) with Hoeffding or monotone radii, and
/// optionally the observed-successor support restriction.
AmbiguitySet frequentist_set(const Dataset& dataset, const ConfidenceBudget& budget,
                             bool monotone = false, bool good_turing = false);

}  // namespace rmdp
