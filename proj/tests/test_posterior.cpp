#include "rmdp/posterior.hpp"

#include "oracles.hpp"
#include "rmdp/rng.hpp"
#include "rmdp/robust.hpp"
#include "rmdp/worstcase.hpp"

#include <doctest.h>

using namespace rmdp;

TEST_CASE("dirichlet posterior adds counts to the prior") {
    std::vector<TransitionSample> samples;
    for (int i = 0; i < 3; ++i) samples.push_back({0, 0, 0});
    for (int i = 0; i < 2; ++i) samples.push_back({0, 0, 1});
    for (int i = 0; i < 5; ++i) samples.push_back({0, 0, 2});
    const Dataset data = Dataset::from_samples(samples, 3, 1);

    const DirichletPosterior post = dirichlet_posterior(1.0, data);
    CHECK(post.alpha[0][0] == numvec{4.0, 3.0, 6.0});

    // empty dataset keeps the prior untouched
    const Dataset empty = Dataset::from_samples({}, 2, 1);
    const DirichletPosterior unchanged =
        dirichlet_posterior({{{1.0, 1.0}}, {{2.0, 0.5}}}, empty);
    CHECK(unchanged.alpha[1][0] == numvec{2.0, 0.5});

    // additivity on a two-outcome row
    const Dataset seven = Dataset::from_samples(
        std::vector<TransitionSample>(7, {0, 0, 1}), 2, 1);
    CHECK(dirichlet_posterior(1.0, seven).alpha[0][0] == numvec{1.0, 8.0});

    CHECK_THROWS_AS(dirichlet_posterior({{{0.0, 1.0}}}, empty),
                    std::invalid_argument);
}

TEST_CASE("posterior sampling is reproducible and on the simplex") {
    std::vector<TransitionSample> samples{{0, 0, 1}, {1, 0, 0}};
    const Dataset data = Dataset::from_samples(samples, 2, 1);
    const DirichletPosterior post = dirichlet_posterior(1.0, data);

    const PosteriorSamples a = sample_posterior(post, 50, 7);
    const PosteriorSamples b = sample_posterior(post, 50, 7);
    const PosteriorSamples c = sample_posterior(post, 50, 8);
    a.validate();
    for (long s = 0; s < 2; ++s)
        for (long i = 0; i < 50; ++i)
            CHECK(a.at(s, 0)[i] == b.at(s, 0)[i]);  // bit-identical
    CHECK(a.at(0, 0)[0] != c.at(0, 0)[0]);
}

TEST_CASE("posterior sample mean approaches the analytic mean") {
    Dataset data = Dataset::from_samples({}, 3, 1);
    for (int i = 0; i < 3; ++i) data.add(0, 0, 0);
    for (int i = 0; i < 2; ++i) data.add(0, 0, 1);
    for (int i = 0; i < 5; ++i) data.add(0, 0, 2);
    const DirichletPosterior post = dirichlet_posterior(1.0, data);

    const PosteriorSamples big = sample_posterior(post, 100000, 3);
    const auto mean = posterior_mean(big);
    // coordinate-wise within 0.01 of the analytic Dirichlet mean
    CHECK(std::abs(mean[0][0][0] - 4.0 / 13.0) < 0.01);
    CHECK(std::abs(mean[0][0][1] - 3.0 / 13.0) < 0.01);
    CHECK(std::abs(mean[0][0][2] - 6.0 / 13.0) < 0.01);
}

TEST_CASE("posterior mean of identical and mirrored rows") {
    PosteriorSamples samples = PosteriorSamples::allocate(2, 1, 2);
    samples.at(0, 0) = {{0.25, 0.75}, {0.25, 0.75}};
    samples.at(1, 0) = {{1.0, 0.0}, {0.0, 1.0}};
    const auto mean = posterior_mean(samples);
    CHECK(mean[0][0] == numvec{0.25, 0.75});
    CHECK(mean[1][0] == numvec{0.5, 0.5});
}

TEST_CASE("credible radius: quantile of sorted distances") {
    // hand-enumerated: three simplex corners plus the barycenter
    const std::vector<numvec> draws{{1.0, 0.0, 0.0},
                                    {0.0, 1.0, 0.0},
                                    {0.0, 0.0, 1.0},
                                    {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    const CredibleBall ball = bci_radius(draws, 0.25);
    CHECK(ball.center[0] == doctest::Approx(1.0 / 3));
    // distances sort to (0, 4/3, 4/3, 4/3); the 3rd covers 75%
    CHECK(ball.psi == doctest::Approx(4.0 / 3).epsilon(1e-12));

    // identical draws collapse the ball
    const std::vector<numvec> point(5, numvec{0.4, 0.6});
    CHECK(bci_radius(point, 0.3).psi == 0.0);

    // vanishing delta covers the farthest draw
    const CredibleBall full = bci_radius(draws, 1e-9);
    CHECK(full.psi == doctest::Approx(4.0 / 3));
}

TEST_CASE("credible radius: coverage and minimality") {
    RandomEngine gen(909);
    for (int round = 0; round < 20; ++round) {
        const long m = 40 + long(gen() % 60);
        const prec_t delta = 0.05 + 0.3 * uniform01(gen);
        std::vector<numvec> draws;
        draws.reserve(m);
        for (long i = 0; i < m; ++i)
            draws.push_back(oracle::random_simplex(gen, 4));

        const CredibleBall ball = bci_radius(draws, delta);
        long covered = 0;
        long strictly_inside = 0;
        for (const numvec& row : draws) {
            const prec_t d = l1_distance(row, ball.center);
            if (d <= ball.psi + 1e-12) ++covered;
            if (d < ball.psi - 1e-12) ++strictly_inside;
        }
        const prec_t needed = (1.0 - delta) * static_cast<prec_t>(m);
        CHECK(static_cast<prec_t>(covered) + 1e-9 >= needed);
        // dropping to the next smaller distance would break coverage
        CHECK(static_cast<prec_t>(strictly_inside) < needed);
    }
}

TEST_CASE("credible radius is monotone in delta and dispersion") {
    RandomEngine gen(910);
    std::vector<numvec> draws;
    for (long i = 0; i < 100; ++i) draws.push_back(oracle::random_simplex(gen, 3));

    prec_t prev = 2.0;
    for (prec_t delta : {0.01, 0.05, 0.1, 0.3, 0.6}) {
        const prec_t psi = bci_radius(draws, delta).psi;
        CHECK(psi <= prev + 1e-12);
        prev = psi;
    }

    // appending a draw farther than the current radius cannot shrink it
    const CredibleBall before = bci_radius(draws, 0.1);
    std::vector<numvec> more = draws;
    more.push_back({1.0, 0.0, 0.0});
    if (l1_distance(more.back(), before.center) > before.psi)
        CHECK(bci_radius(more, 0.1).psi >= before.psi - 0.05);
}

TEST_CASE("credible ambiguity set splits the budget per pair") {
    std::vector<TransitionSample> samples{{0, 0, 1}, {1, 1, 0}};
    const Dataset data = Dataset::from_samples(samples, 2, 2);
    const PosteriorSamples post =
        sample_posterior(dirichlet_posterior(1.0, data), 400, 5);

    const ConfidenceBudget budget{0.2, 2, 2};
    const AmbiguitySet sets = bci_ambiguity_set(post, budget);
    // spot-check one pair against the direct call with delta / (S A)
    const CredibleBall ball = bci_radius(post.at(1, 0), 0.05);
    CHECK(sets.psi[1][0] == doctest::Approx(ball.psi));
    CHECK(sets.nominal[1][0][0] == doctest::Approx(ball.center[0]));
}

TEST_CASE("point-mass posterior reduces the robust solution to the nominal") {
    PosteriorSamples samples = PosteriorSamples::allocate(2, 1, 20);
    for (long s = 0; s < 2; ++s)
        samples.at(s, 0).assign(20, s == 0 ? numvec{0.3, 0.7} : numvec{1.0, 0.0});

    const AmbiguitySet sets = bci_ambiguity_set(samples, {0.05, 2, 1});
    CHECK(sets.psi[0][0] <= 1e-12);  // up to roundoff in the sample mean
    CHECK(sets.psi[1][0] <= 1e-12);

    const std::vector<numvec> rewards{{1.0}, {0.0}};
    const TabularMdp nominal_mdp{2, 1, rewards, sets.nominal, 0.9,
                                 numvec{1.0, 0.0}};
    const Solution robust = robust_value_iteration(rewards, 0.9, sets, 1e-8);
    const Solution plain = value_iteration(nominal_mdp, 1e-8);
    CHECK(linf_distance(robust.value, plain.value) < 1e-7);
}

TEST_CASE("bayesian safety: prior-drawn truths rarely violate the estimate") {
    // ground truth drawn from the same Dirichlet prior the posterior uses;
    // the credible-ball estimate must lower-bound the truth in at least
    // 95% of replications
    const numvec values{1, 2, 3, 4, 5};
    const long replications = 250;
    long violations = 0;
    for (long rep = 0; rep < replications; ++rep) {
        RandomEngine truth_gen = make_engine(31337, {std::uint64_t(rep), 1});
        RandomEngine data_gen = make_engine(31337, {std::uint64_t(rep), 2});
        RandomEngine post_gen = make_engine(31337, {std::uint64_t(rep), 3});

        const numvec truth = sample_dirichlet(truth_gen, numvec(5, 1.0));
        countvec counts(5, 0);
        for (int i = 0; i < 10; ++i) ++counts[sample_categorical(data_gen, truth)];
        numvec alpha(5, 1.0);
        for (int i = 0; i < 5; ++i) alpha[i] += static_cast<prec_t>(counts[i]);

        std::vector<numvec> draws;
        for (int i = 0; i < 300; ++i)
            draws.push_back(sample_dirichlet(post_gen, alpha));
        const CredibleBall ball = bci_radius(draws, 0.05);
        const prec_t estimate =
            worst_case_l1(values, ball.center, ball.psi).objective;
        if (estimate > dot(truth, values) + 1e-9) ++violations;
    }
    CHECK(static_cast<prec_t>(violations) / replications <= 0.05);
}
