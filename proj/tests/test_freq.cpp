#include "rmdp/freq.hpp"

#include "oracles.hpp"
#include "rmdp/rng.hpp"
#include "rmdp/worstcase.hpp"

#include <doctest.h>

#include <cmath>

using namespace rmdp;

TEST_CASE("hoeffding radius formula") {
    const ConfidenceBudget budget{0.1, 3, 1};
    // independent computation without the expanded-log form
    const prec_t direct = std::sqrt(2.0 / 10.0 * std::log(3.0 * 1.0 * 8.0 / 0.1));
    CHECK(hoeffding_radius(10, budget) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(hoeffding_radius(10, budget) == doctest::Approx(1.0470).epsilon(1e-3));

    CHECK(hoeffding_radius(0, budget) == 2.0);
    // large n caps below the simplex diameter and decays like 1/sqrt(n)
    CHECK(hoeffding_radius(1000000, budget) < 0.01);
}

TEST_CASE("hoeffding monotone radius formula") {
    const ConfidenceBudget budget{0.1, 3, 1};
    const prec_t direct = std::sqrt(2.0 / 10.0 * std::log(9.0 / 0.1));
    CHECK(hoeffding_monotone_radius(10, budget) ==
          doctest::Approx(direct).epsilon(1e-12));
    CHECK(hoeffding_monotone_radius(10, budget) ==
          doctest::Approx(0.9487).epsilon(1e-3));
    CHECK(hoeffding_monotone_radius(0, budget) == 2.0);
}

TEST_CASE("monotone radius never exceeds the plain radius") {
    for (long S = 2; S <= 12; ++S) {
        for (long A : {1L, 2L, 5L}) {
            for (prec_t delta : {0.01, 0.05, 0.2}) {
                const ConfidenceBudget budget{delta, S, A};
                for (long n : {1L, 4L, 30L, 500L}) {
                    CHECK(hoeffding_monotone_radius(n, budget) <=
                          hoeffding_radius(n, budget) + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("radii are monotone in every parameter") {
    const ConfidenceBudget base{0.1, 4, 2};
    // decreasing in n
    prec_t prev = 2.0;
    for (long n : {1L, 2L, 5L, 10L, 100L}) {
        const prec_t r = hoeffding_radius(n, base);
        CHECK(r <= prev + 1e-15);
        prev = r;
    }
    // increasing in S, A, 1/delta (uncapped regime: use large n)
    const long n = 100000;
    CHECK(hoeffding_radius(n, {0.1, 5, 2}) > hoeffding_radius(n, {0.1, 4, 2}));
    CHECK(hoeffding_radius(n, {0.1, 4, 3}) > hoeffding_radius(n, {0.1, 4, 2}));
    CHECK(hoeffding_radius(n, {0.05, 4, 2}) > hoeffding_radius(n, {0.1, 4, 2}));
    CHECK(hoeffding_monotone_radius(n, {0.1, 5, 2}) >
          hoeffding_monotone_radius(n, {0.1, 4, 2}));
    CHECK(hoeffding_monotone_radius(n, {0.05, 4, 2}) >
          hoeffding_monotone_radius(n, {0.1, 4, 2}));
}

TEST_CASE("explicit successor dimension decouples the union bound") {
    // one ambiguity set over a 5-dimensional simplex: the budget stays at
    // delta while the 2^dim term reflects the successor count
    const ConfidenceBudget budget{0.05, 1, 1};
    const prec_t expected =
        std::sqrt(2.0 / 20.0 * (5.0 * std::log(2.0) - std::log(0.05)));
    CHECK(hoeffding_radius(20, budget, 5) == doctest::Approx(expected));
    CHECK(hoeffding_monotone_radius(20, budget, 5) ==
          doctest::Approx(std::sqrt(2.0 / 20.0 * std::log(5.0 / 0.05))));
}

TEST_CASE("good-turing support mask") {
    CHECK(good_turing_support({3, 2, 5}) == supportvec{1, 1, 1});
    CHECK(good_turing_support({3, 0, 5}) == supportvec{1, 0, 1});
    CHECK(good_turing_support({0, 0, 0}) == supportvec{1, 1, 1});
    CHECK_THROWS_AS(good_turing_support({1, -2, 0}), std::invalid_argument);
}

TEST_CASE("frequentist set assembly") {
    std::vector<TransitionSample> samples;
    for (int i = 0; i < 3; ++i) samples.push_back({0, 0, 0});
    for (int i = 0; i < 5; ++i) samples.push_back({0, 0, 2});
    const Dataset data = Dataset::from_samples(samples, 3, 1);
    const ConfidenceBudget budget{0.05, 3, 1};

    const AmbiguitySet sets = frequentist_set(data, budget);
    CHECK(sets.psi[0][0] == doctest::Approx(hoeffding_radius(8, budget)));
    CHECK(sets.psi[1][0] == 2.0);  // unvisited pair covers the whole simplex
    CHECK(sets.nominal[1][0][0] == doctest::Approx(1.0 / 3.0));

    const AmbiguitySet masked = frequentist_set(data, budget, false, true);
    CHECK(masked.support[0][0] == supportvec{1, 0, 1});
    CHECK(masked.support[1][0] == supportvec{1, 1, 1});

    const AmbiguitySet monotone = frequentist_set(data, budget, true);
    CHECK(monotone.psi[0][0] ==
          doctest::Approx(hoeffding_monotone_radius(8, budget)));
}

TEST_CASE("frequentist safety holds on simulated datasets") {
    // fixed ground truth over five successors; the Hoeffding ball must
    // cover it often enough that the worst-case estimate stays below the
    // true value in at least 95% of replications
    const numvec values{1, 2, 3, 4, 5};
    RandomEngine truth_gen(4242);
    const numvec truth = oracle::random_simplex(truth_gen, 5);
    const prec_t true_value = dot(truth, values);
    const ConfidenceBudget budget{0.05, 1, 1};

    const long replications = 250;
    long violations = 0;
    for (long rep = 0; rep < replications; ++rep) {
        RandomEngine gen = make_engine(900 + rep, {1});
        countvec counts(5, 0);
        const long n = 20;
        for (long i = 0; i < n; ++i) ++counts[sample_categorical(gen, truth)];
        numvec nominal(5);
        for (int i = 0; i < 5; ++i)
            nominal[i] = static_cast<prec_t>(counts[i]) / n;
        const prec_t psi = hoeffding_radius(n, budget, 5);
        const prec_t estimate = worst_case_l1(values, nominal, psi).objective;
        if (estimate > true_value + 1e-9) ++violations;
    }
    CHECK(static_cast<prec_t>(violations) / replications <= 0.05);
}
