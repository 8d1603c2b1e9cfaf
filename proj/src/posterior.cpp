#include "rmdp/posterior.hpp"

#include "rmdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rmdp {

PosteriorSamples PosteriorSamples::allocate(long num_states, long num_actions,
                                            long num_samples) {
    if (num_states < 1 || num_actions < 1 || num_samples < 1)
        throw std::invalid_argument("posterior samples: empty dimensions");
    PosteriorSamples out;
    out.num_states = num_states;
    out.num_actions = num_actions;
    out.num_samples = num_samples;
    out.draws.assign(std::size_t(num_states) * num_actions, {});
    return out;
}

void PosteriorSamples::validate(prec_t tol) const {
    if (num_samples < 1)
        throw std::invalid_argument("posterior samples: need at least one draw");
    if (long(draws.size()) != num_states * num_actions)
        throw std::invalid_argument("posterior samples: wrong pair count");
    for (long s = 0; s < num_states; ++s) {
        for (long a = 0; a < num_actions; ++a) {
            const auto& rows = at(s, a);
            if (long(rows.size()) != num_samples)
                throw std::invalid_argument(
                    "posterior samples: draw count differs at pair (" +
                    std::to_string(s) + "," + std::to_string(a) + ")");
            for (const numvec& row : rows) {
                if (long(row.size()) != num_states)
                    throw std::invalid_argument(
                        "posterior samples: wrong row length");
                if (!is_probability_vector(row, tol))
                    throw std::invalid_argument(
                        "posterior samples: row off the simplex at pair (" +
                        std::to_string(s) + "," + std::to_string(a) + ")");
            }
        }
    }
}

numvec DirichletPosterior::mean(long s, long a) const {
    const numvec& al = alpha[s][a];
    prec_t total = 0;
    for (prec_t x : al) total += x;
    numvec m(al.size());
    for (std::size_t i = 0; i < al.size(); ++i) m[i] = al[i] / total;
    return m;
}

DirichletPosterior dirichlet_posterior(
    const std::vector<std::vector<numvec>>& prior_alpha, const Dataset& dataset) {
    DirichletPosterior post;
    post.num_states = long(prior_alpha.size());
    post.num_actions = post.num_states > 0 ? long(prior_alpha[0].size()) : 0;
    if (dataset.num_states > post.num_states ||
        dataset.num_actions > post.num_actions)
        throw std::invalid_argument("dirichlet_posterior: dataset does not fit");
    post.alpha = prior_alpha;
    for (long s = 0; s < post.num_states; ++s) {
        for (long a = 0; a < post.num_actions; ++a) {
            for (prec_t x : prior_alpha[s][a])
                if (x <= 0)
                    throw std::invalid_argument(
                        "dirichlet_posterior: prior concentrations must be positive");
            if (s >= dataset.num_states || a >= dataset.num_actions) continue;
            for (long sp = 0; sp < dataset.num_states; ++sp)
                post.alpha[s][a][sp] += static_cast<prec_t>(dataset.c[s][a][sp]);
        }
    }
    return post;
}

DirichletPosterior dirichlet_posterior(prec_t prior_concentration,
                                       const Dataset& dataset) {
    if (dataset.num_states < 1 || dataset.num_actions < 1)
        throw std::invalid_argument("dirichlet_posterior: empty dataset dimensions");
    const std::vector<std::vector<numvec>> prior(
        dataset.num_states,
        std::vector<numvec>(dataset.num_actions,
                            numvec(dataset.num_states, prior_concentration)));
    return dirichlet_posterior(prior, dataset);
}

PosteriorSamples sample_posterior(const DirichletPosterior& posterior, long m,
                                  std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("sample_posterior: m must be positive");
    PosteriorSamples out =
        PosteriorSamples::allocate(posterior.num_states, posterior.num_actions, m);
    for (long s = 0; s < posterior.num_states; ++s) {
        for (long a = 0; a < posterior.num_actions; ++a) {
            RandomEngine gen =
                make_engine(seed, {std::uint64_t(s), std::uint64_t(a)});
            auto& rows = out.at(s, a);
            rows.reserve(m);
            for (long i = 0; i < m; ++i)
                rows.push_back(sample_dirichlet(gen, posterior.alpha[s][a]));
        }
    }
    return out;
}

std::vector<std::vector<numvec>> posterior_mean(const PosteriorSamples& samples) {
    if (samples.num_samples < 1)
        throw std::invalid_argument("posterior_mean: no draws");
    std::vector<std::vector<numvec>> mean(
        samples.num_states,
        std::vector<numvec>(samples.num_actions, numvec(samples.num_states, 0.0)));
    for (long s = 0; s < samples.num_states; ++s) {
        for (long a = 0; a < samples.num_actions; ++a) {
            for (const numvec& row : samples.at(s, a))
                for (long sp = 0; sp < samples.num_states; ++sp)
                    mean[s][a][sp] += row[sp];
            for (prec_t& x : mean[s][a])
                x /= static_cast<prec_t>(samples.num_samples);
        }
    }
    return mean;
}

CredibleBall bci_radius(const std::vector<numvec>& samples_sa, prec_t delta_sa) {
    if (samples_sa.empty())
        throw std::invalid_argument("bci_radius: no posterior draws");
    if (delta_sa <= 0 || delta_sa >= 1)
        throw std::invalid_argument("bci_radius: delta must lie in (0,1)");
    const long m = long(samples_sa.size());
    const std::size_t dim = samples_sa.front().size();

    CredibleBall ball;
    ball.center.assign(dim, 0.0);
    for (const numvec& row : samples_sa)
        for (std::size_t i = 0; i < dim; ++i) ball.center[i] += row[i];
    for (prec_t& x : ball.center) x /= static_cast<prec_t>(m);

    numvec dist;
    dist.reserve(m);
    for (const numvec& row : samples_sa)
        dist.push_back(l1_distance(ball.center, row));
    std::sort(dist.begin(), dist.end());

    // smallest radius covering at least a (1 - delta_sa) fraction:
    // ascending 1-based index ceil((1-delta_sa) m)
    long idx = static_cast<long>(
        std::ceil((1.0 - delta_sa) * static_cast<prec_t>(m) - 1e-9));
    idx = std::clamp(idx, 1L, m);
    ball.psi = std::clamp(dist[idx - 1], prec_t(0), prec_t(2));
    return ball;
}

AmbiguitySet bci_ambiguity_set(const PosteriorSamples& samples,
                               const ConfidenceBudget& budget) {
    if (budget.num_states != samples.num_states ||
        budget.num_actions != samples.num_actions)
        throw std::invalid_argument("bci_ambiguity_set: budget dimension mismatch");
    const prec_t delta_sa = budget.per_pair();
    std::vector<std::vector<numvec>> nominal(
        samples.num_states, std::vector<numvec>(samples.num_actions));
    std::vector<numvec> psi(samples.num_states, numvec(samples.num_actions, 0.0));
    for (long s = 0; s < samples.num_states; ++s) {
        for (long a = 0; a < samples.num_actions; ++a) {
            CredibleBall ball = bci_radius(samples.at(s, a), delta_sa);
            nominal[s][a] = std::move(ball.center);
            psi[s][a] = ball.psi;
        }
    }
    return AmbiguitySet::create(std::move(nominal), std::move(psi));
}

}  // namespace rmdp
