#pragma once

#include "rmdp/ambiguity.hpp"
#include "rmdp/definitions.hpp"

namespace rmdp {

struct WorstCaseResult {
    numvec q;           // exact minimizer
    prec_t objective;   // q . v
};

/// Solves min { q.v : q in simplex, ||q - p_bar||_1 <= psi } exactly by
/// greedy mass transfer: up to psi/2 probability moves onto the smallest
/// value entry, taken from the largest value entries in descending
/// order. Ties are resolved toward the lowest index.
///
/// Throws std::invalid_argument for psi < 0 or p_bar off the simplex.
WorstCaseResult worst_case_l1(const numvec& v, const numvec& p_bar, prec_t psi);

/// Same, restricted to the successor states marked in `support`. Masked
/// states must carry zero nominal probability; the minimizer assigns
/// them zero as well.
WorstCaseResult worst_case_l1(const numvec& v, const numvec& p_bar, prec_t psi,
                              const supportvec& support);

/// Optimal objective of the reduced-constraint formulation: the L1 ball
/// is replaced by the band constraints
///     (1_{k..n} - 1_{1..k-1}) . (p - p_bar) <= psi,  k = 0..n+1
/// solved as an explicit linear program. For a nonincreasing value
/// vector this coincides with worst_case_l1; otherwise it is a
/// relaxation (the optimum can only be lower).
prec_t worst_case_l1_monotone(const numvec& v, const numvec& p_bar, prec_t psi);

}  // namespace rmdp
