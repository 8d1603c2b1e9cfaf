#pragma once

#include "rmdp/ambiguity.hpp"
#include "rmdp/freq.hpp"
#include "rmdp/mdp.hpp"

#include <cstdint>

namespace rmdp {

/// Monte Carlo draws from the posterior over transition kernels:
/// for every state-action pair, m probability vectors over successor
/// states. The draw count m must match across pairs.
struct PosteriorSamples {
    long num_states = 0;
    long num_actions = 0;
    long num_samples = 0;  // m

    /// draws[s * num_actions + a] is an m-row list of simplex points
    std::vector<std::vector<numvec>> draws;

    static PosteriorSamples allocate(long num_states, long num_actions,
                                     long num_samples);

    const std::vector<numvec>& at(long s, long a) const {
        return draws[std::size_t(s) * num_actions + a];
    }
    std::vector<numvec>& at(long s, long a) {
        return draws[std::size_t(s) * num_actions + a];
    }

    /// Checks row lengths, the simplex property and the uniform draw
    /// count. `tol` bounds the acceptable deviation of row sums from 1.
    void validate(prec_t tol = 1e-10) const;
};

/// Conjugate Dirichlet model over every transition row.
struct DirichletPosterior {
    long num_states = 0;
    long num_actions = 0;
    std::vector<std::vector<numvec>> alpha;  // [s][a][s'], all positive

    numvec mean(long s, long a) const;
};

/// Posterior concentration parameters alpha + successor counts.
DirichletPosterior dirichlet_posterior(
    const std::vector<std::vector<numvec>>& prior_alpha, const Dataset& dataset);

/// Convenience overload for a flat prior with a constant concentration.
DirichletPosterior dirichlet_posterior(prec_t prior_concentration,
                                       const Dataset& dataset);

/// m independent draws per state-action pair. Each pair samples from its
/// own stream derived as hash(seed, s, a), so results do not depend on
/// evaluation order.
PosteriorSamples sample_posterior(const DirichletPosterior& posterior, long m,
                                  std::uint64_t seed);

/// Coordinate-wise mean of the posterior draws.
std::vector<std::vector<numvec>> posterior_mean(const PosteriorSamples& samples);

struct CredibleBall {
    numvec center;  // sample mean
    prec_t psi = 0;
};

/// Smallest L1 ball around the sample mean covering at least a
/// (1 - delta_sa) fraction of the draws: takes the ceil((1-delta_sa) m)-th
/// smallest distance, clamped to [0,2].
CredibleBall bci_radius(const std::vector<numvec>& samples_sa, prec_t delta_sa);

/// Applies bci_radius per state-action pair with the union-bound budget
/// delta / (S A).
AmbiguitySet bci_ambiguity_set(const PosteriorSamples& samples,
                               const ConfidenceBudget& budget);

}  // namespace rmdp
