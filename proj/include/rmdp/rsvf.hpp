#pragma once

#include "rmdp/ambiguity.hpp"
#include "rmdp/mdp.hpp"
#include "rmdp/posterior.hpp"

#include <cstdint>
#include <stdexcept>

namespace rmdp {

/// Raised when a safety half-space {p in simplex : p.v <= g} is empty,
/// i.e. g < min(v). Distances to an empty set are undefined.
struct EmptyHalfspaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Half-space of transition probabilities that are safe for the value
/// function v at one state-action pair: K = {p in simplex : p.v <= g}.
struct SafetyHalfspace {
    numvec v;
    prec_t g = 0;
    long s = 0;
    long a = 0;

    bool feasible() const;
};

/// Largest threshold g such that at least a zeta fraction of the
/// posterior draws q_i satisfies g <= q_i . v; computed from the sorted
/// sample values.
prec_t quantile_threshold_g(const std::vector<numvec>& samples_sa, const numvec& v,
                            prec_t zeta);

struct HalfspaceDistance {
    prec_t d = 0;   // ||q - p||_1 at the closest point
    numvec q;       // closest point of the half-space
};

/// L1 projection distance of p onto a safety half-space, by greedy mass
/// transfer from high-value to low-value states. Zero when p already
/// satisfies the constraint. Throws EmptyHalfspaceError when K is empty.
HalfspaceDistance dist_to_halfspace(const numvec& p, const SafetyHalfspace& h);

struct MinimaxCenter {
    numvec theta;
    prec_t psi = 0;
};

/// Center and radius of the smallest L1 ball intersecting every given
/// half-space:
///     min_{p in simplex} max_h min_{q in K_h} ||q - p||_1
/// solved as one linear program. Among the optimal centers, a second
/// stage picks one maximizing sum_h theta . v_h, which keeps the
/// resulting robust estimates tight (any optimal center is equally safe).
MinimaxCenter minimax_center(const std::vector<SafetyHalfspace>& halfspaces);

/// Whether the L1 ball (theta, psi) intersects the half-space: true iff
/// the projection distance of the center is within psi (plus slack for
/// solver roundoff).
bool termination_check(const numvec& theta, prec_t psi, const SafetyHalfspace& h);

struct RsvfDiagnostics {
    long iterations = 0;
    bool terminated = false;   // intersection test passed before max_iter
    bool fallback_used = false;
    std::vector<std::vector<std::uint8_t>> termination_status;  // [s][a]
    std::vector<std::vector<std::uint8_t>> fallback_pairs;      // [s][a]
    std::vector<numvec> psi;                                    // [s][a]
    std::vector<std::vector<numvec>> theta;                     // [s][a][s']
    numvec objective_trace;  // p0 . v_hat after each robust solve
};

struct RsvfResult {
    indexvec policy;
    numvec value;
    prec_t safe_return = 0;
    AmbiguitySet sets;  // final ambiguity sets (credible balls where fallen back)
    RsvfDiagnostics diagnostics;
};

/// Iteratively grows a set of candidate optimal value functions, rebuilds
/// per-pair ambiguity balls positioned against the candidates' safety
/// half-spaces, and re-solves the robust MDP until the optimal value
/// function is itself covered. Pairs still failing the intersection test
/// after max_iter iterations fall back to their Bayesian credible balls.
RsvfResult rsvf_solve(const std::vector<numvec>& rewards, prec_t gamma,
                      const numvec& initial_dist, const PosteriorSamples& samples,
                      prec_t delta, long max_iter = 20, prec_t tol = DEFAULT_TOL);

}  // namespace rmdp
