#include "rmdp/freq.hpp"

#include <cmath>
#include <stdexcept>

namespace rmdp {

namespace {

void check_budget(const ConfidenceBudget& budget) {
    if (budget.delta <= 0 || budget.delta >= 1)
        throw std::invalid_argument("confidence budget: delta must lie in (0,1)");
    if (budget.num_states < 1 || budget.num_actions < 1)
        throw std::invalid_argument("confidence budget: empty state or action space");
}

// radius = sqrt(2/n * log_term), capped at the simplex diameter
prec_t capped_radius(long n, prec_t log_term) {
    if (n < 0) throw std::invalid_argument("radius: negative sample count");
    if (n == 0) return 2.0;
    return std::min(prec_t(2), std::sqrt(2.0 / static_cast<prec_t>(n) * log_term));
}

}  // namespace

prec_t hoeffding_radius(long n, const ConfidenceBudget& budget, long dim) {
    check_budget(budget);
    if (dim < 0) dim = budget.num_states;
    // log(S A 2^dim / delta), expanded to avoid overflowing 2^dim
    const prec_t log_term = std::log(static_cast<prec_t>(budget.num_states)) +
                            std::log(static_cast<prec_t>(budget.num_actions)) +
                            static_cast<prec_t>(dim) * std::log(prec_t(2)) -
                            std::log(budget.delta);
    return capped_radius(n, log_term);
}

prec_t hoeffding_monotone_radius(long n, const ConfidenceBudget& budget, long dim) {
    check_budget(budget);
    if (dim < 0) dim = budget.num_states;
    const prec_t log_term = std::log(static_cast<prec_t>(budget.num_states)) +
                            std::log(static_cast<prec_t>(budget.num_actions)) +
                            std::log(static_cast<prec_t>(dim)) -
                            std::log(budget.delta);
    return capped_radius(n, log_term);
}

supportvec good_turing_support(const countvec& counts) {
    supportvec mask(counts.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] < 0)
            throw std::invalid_argument("good_turing_support: negative count");
        mask[i] = counts[i] > 0;
        any = any || mask[i];
    }
    if (!any) std::fill(mask.begin(), mask.end(), 1);
    return mask;
}

AmbiguitySet frequentist_set(const Dataset& dataset, const ConfidenceBudget& budget,
                             bool monotone, bool good_turing) {
    check_budget(budget);
    const long S = budget.num_states;
    const long A = budget.num_actions;
    auto nominal = empirical_model(dataset, S, A);

    std::vector<numvec> psi(S, numvec(A, 0.0));
    std::vector<std::vector<supportvec>> support;
    if (good_turing) support.assign(S, std::vector<supportvec>(A));

    for (long s = 0; s < S; ++s) {
        for (long a = 0; a < A; ++a) {
            const long n =
                (s < dataset.num_states && a < dataset.num_actions) ? dataset.n[s][a]
                                                                    : 0;
            psi[s][a] = monotone ? hoeffding_monotone_radius(n, budget)
                                 : hoeffding_radius(n, budget);
            if (good_turing) {
                countvec counts(S, 0);
                if (s < dataset.num_states && a < dataset.num_actions)
                    for (long sp = 0; sp < dataset.num_states; ++sp)
                        counts[sp] = dataset.c[s][a][sp];
                support[s][a] = good_turing_support(counts);
            }
        }
    }
    return AmbiguitySet::create(std::move(nominal), std::move(psi),
                                std::move(support));
}

}  // namespace rmdp
