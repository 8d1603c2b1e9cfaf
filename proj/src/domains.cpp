#include "rmdp/domains.hpp"

#include <cmath>
#include <stdexcept>

namespace rmdp {

namespace {

prec_t normal_cdf(prec_t x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

}  // namespace

TabularMdp sample_ground_truth(const TabularMdp& template_mdp,
                               const std::vector<std::vector<numvec>>& prior_alpha,
                               std::uint64_t seed) {
    template_mdp.validate();
    if (long(prior_alpha.size()) != template_mdp.num_states)
        throw std::invalid_argument("sample_ground_truth: prior state count mismatch");
    TabularMdp truth = template_mdp;
    for (long s = 0; s < truth.num_states; ++s) {
        if (long(prior_alpha[s].size()) != truth.num_actions)
            throw std::invalid_argument(
                "sample_ground_truth: prior action count mismatch");
        for (long a = 0; a < truth.num_actions; ++a) {
            RandomEngine gen = make_engine(seed, {std::uint64_t(s), std::uint64_t(a)});
            truth.transitions[s][a] = sample_dirichlet(gen, prior_alpha[s][a]);
        }
    }
    truth.validate();
    return truth;
}

Dataset simulate_dataset(const TabularMdp& truth, long per_pair_count,
                         std::uint64_t seed) {
    if (per_pair_count < 0)
        throw std::invalid_argument("simulate_dataset: negative sample count");
    Dataset data = Dataset::from_samples({}, truth.num_states, truth.num_actions);
    for (long s = 0; s < truth.num_states; ++s) {
        for (long a = 0; a < truth.num_actions; ++a) {
            RandomEngine gen = make_engine(seed, {std::uint64_t(s), std::uint64_t(a)});
            for (long i = 0; i < per_pair_count; ++i)
                data.add(s, a, sample_categorical(gen, truth.transitions[s][a]));
        }
    }
    return data;
}

TabularMdp make_riverswim(const RiverSwimSpec& spec) {
    const long n = spec.num_states;
    if (n < 2) throw std::invalid_argument("riverswim: needs at least two states");
    TabularMdp mdp;
    mdp.num_states = n;
    mdp.num_actions = 2;
    mdp.discount = spec.discount;
    mdp.rewards.assign(n, numvec(2, 0.0));
    mdp.transitions.assign(n, std::vector<numvec>(2, numvec(n, 0.0)));
    mdp.initial_dist.assign(n, 0.0);
    mdp.initial_dist[0] = 1.0;

    mdp.rewards[0][0] = spec.left_reward;
    mdp.rewards[n - 1][1] = spec.right_reward;

    for (long s = 0; s < n; ++s) {
        // action 0: swim left with the current, deterministic
        mdp.transitions[s][0][std::max(s - 1, 0L)] = 1.0;
        // action 1: swim right against the current
        numvec& right = mdp.transitions[s][1];
        if (s == 0) {
            right[0] = spec.edge_stay;
            right[1] = 1.0 - spec.edge_stay;
        } else if (s == n - 1) {
            right[n - 1] = spec.edge_stay;
            right[n - 2] = 1.0 - spec.edge_stay;
        } else {
            right[s + 1] = spec.advance;
            right[s] = spec.stay;
            right[s - 1] = spec.retreat;
        }
    }
    mdp.validate();
    return mdp;
}

// --- single-state problems ------------------------------------------

numvec SingleStateDirichlet::sample_truth(RandomEngine& gen) const {
    return sample_dirichlet(gen, prior_alpha);
}

countvec SingleStateDirichlet::simulate_counts(const numvec& truth, long n,
                                               RandomEngine& gen) const {
    check_probability_vector(truth, "single_state: truth", 1e-9);
    countvec counts(truth.size(), 0);
    for (long i = 0; i < n; ++i) ++counts[sample_categorical(gen, truth)];
    return counts;
}

numvec SingleStateDirichlet::posterior_alpha(const countvec& counts) const {
    if (counts.size() != prior_alpha.size())
        throw std::invalid_argument("single_state: count length mismatch");
    numvec alpha = prior_alpha;
    for (std::size_t i = 0; i < counts.size(); ++i)
        alpha[i] += static_cast<prec_t>(counts[i]);
    return alpha;
}

std::vector<numvec> SingleStateDirichlet::sample_posterior(const countvec& counts,
                                                           long m,
                                                           RandomEngine& gen) const {
    const numvec alpha = posterior_alpha(counts);
    std::vector<numvec> draws;
    draws.reserve(m);
    for (long i = 0; i < m; ++i) draws.push_back(sample_dirichlet(gen, alpha));
    return draws;
}

numvec SingleStateInventory::kernel(prec_t mu) const {
    const long n = dim();
    numvec p(n, 0.0);
    // level = clamp(round(stock - demand), 1, n); level index = level - 1
    for (long i = 0; i < n; ++i) {
        const long level = i + 1;
        const prec_t demand_hi =
            (level == 1) ? std::numeric_limits<prec_t>::infinity()
                         : static_cast<prec_t>(stock - level) + 0.5;
        const prec_t demand_lo =
            (level == n) ? -std::numeric_limits<prec_t>::infinity()
                         : static_cast<prec_t>(stock - level) - 0.5;
        const prec_t hi = std::isinf(demand_hi)
                              ? 1.0
                              : normal_cdf((demand_hi - mu) / demand_sigma);
        const prec_t lo = std::isinf(demand_lo)
                              ? 0.0
                              : normal_cdf((demand_lo - mu) / demand_sigma);
        p[i] = hi - lo;
    }
    return p;
}

long SingleStateInventory::demand_to_level(prec_t demand) const {
    const long level =
        std::clamp(std::lround(static_cast<prec_t>(stock) - demand), 1L, dim());
    return level - 1;
}

prec_t SingleStateInventory::sample_truth_mu(RandomEngine& gen) const {
    return sample_normal(gen, prior_mean, prior_sigma);
}

numvec SingleStateInventory::simulate_demands(prec_t mu, long n,
                                              RandomEngine& gen) const {
    numvec demands(n);
    for (prec_t& d : demands) d = sample_normal(gen, mu, demand_sigma);
    return demands;
}

std::pair<prec_t, prec_t> SingleStateInventory::posterior(
    const numvec& demands) const {
    const prec_t prior_precision = 1.0 / (prior_sigma * prior_sigma);
    const prec_t obs_precision = 1.0 / (demand_sigma * demand_sigma);
    prec_t precision = prior_precision;
    prec_t weighted = prior_mean * prior_precision;
    for (prec_t d : demands) {
        precision += obs_precision;
        weighted += d * obs_precision;
    }
    return {weighted / precision, std::sqrt(1.0 / precision)};
}

std::vector<numvec> SingleStateInventory::sample_posterior(const numvec& demands,
                                                           long m,
                                                           RandomEngine& gen) const {
    const auto [mean, stdev] = posterior(demands);
    std::vector<numvec> draws;
    draws.reserve(m);
    for (long i = 0; i < m; ++i)
        draws.push_back(kernel(sample_normal(gen, mean, stdev)));
    return draws;
}

SingleStateDirichlet make_single_state_dirichlet() { return {}; }
SingleStateInventory make_single_state_inventory() { return {}; }

// --- population model ------------------------------------------------

void PopulationParams::validate() const {
    if (carrying_capacity <= 0)
        throw std::invalid_argument("population: carrying capacity must be positive");
    if (bins < 2) throw std::invalid_argument("population: needs at least two bins");
    if (start_bin < 0 || start_bin >= bins)
        throw std::invalid_argument("population: start bin out of range");
    if (actions != 2) throw std::invalid_argument("population: two actions expected");
    if (growth_sigma <= 0 || obs_sigma <= 0 || prior_sigma <= 0)
        throw std::invalid_argument("population: noise levels must be positive");
    if (discount < 0 || discount >= 1)
        throw std::invalid_argument("population: discount must lie in [0,1)");
    if (mc_steps_kernel < 1 || mc_steps_posterior < 1)
        throw std::invalid_argument("population: discretization steps must be positive");
}

PopulationModel::PopulationModel(PopulationParams params) : params_(params) {
    params_.validate();
}

prec_t PopulationModel::midpoint(long bin) const {
    const prec_t width = params_.carrying_capacity / static_cast<prec_t>(params_.bins);
    return (static_cast<prec_t>(bin) + 0.5) * width;
}

numvec PopulationModel::kernel_row(prec_t growth, long bin, long action,
                                   long mc_steps, RandomEngine& gen) const {
    const auto& p = params_;
    const prec_t population = midpoint(bin);
    const prec_t treated = static_cast<prec_t>(action);
    const prec_t mean_rate =
        growth - treated * population * p.beta1 -
        treated * std::pow(std::max(prec_t(0), population - p.threshold), 2) * p.beta2;

    countvec counts(p.bins, 0);
    const prec_t width = p.carrying_capacity / static_cast<prec_t>(p.bins);
    for (long i = 0; i < mc_steps; ++i) {
        const prec_t rate = mean_rate + sample_normal(gen) * p.growth_sigma;
        const prec_t next = std::clamp(rate * population, prec_t(0),
                                       p.carrying_capacity);
        const prec_t observed = next + sample_normal(gen) * p.obs_sigma;
        const long b = std::clamp(static_cast<long>(std::floor(observed / width)), 0L,
                                  p.bins - 1);
        ++counts[b];
    }
    numvec row(p.bins);
    for (long b = 0; b < p.bins; ++b)
        row[b] = static_cast<prec_t>(counts[b]) / static_cast<prec_t>(mc_steps);
    return row;
}

TabularMdp PopulationModel::make_mdp(prec_t growth, long mc_steps,
                                     std::uint64_t seed) const {
    const auto& p = params_;
    TabularMdp mdp;
    mdp.num_states = p.bins;
    mdp.num_actions = p.actions;
    mdp.discount = p.discount;
    mdp.rewards.assign(p.bins, numvec(p.actions, 0.0));
    mdp.transitions.assign(p.bins, std::vector<numvec>(p.actions));
    mdp.initial_dist.assign(p.bins, 0.0);
    mdp.initial_dist[p.start_bin] = 1.0;

    for (long b = 0; b < p.bins; ++b) {
        for (long a = 0; a < p.actions; ++a) {
            mdp.rewards[b][a] = -p.pop_cost * midpoint(b) -
                                p.treat_cost * static_cast<prec_t>(a);
            RandomEngine gen = make_engine(seed, {std::uint64_t(b), std::uint64_t(a)});
            mdp.transitions[b][a] = kernel_row(growth, b, a, mc_steps, gen);
        }
    }
    mdp.validate();
    return mdp;
}

prec_t PopulationModel::sample_truth_growth(RandomEngine& gen) const {
    return sample_normal(gen, params_.prior_mean, params_.prior_sigma);
}

std::pair<prec_t, prec_t> PopulationModel::posterior(const Dataset& data) const {
    const auto& p = params_;
    const prec_t width = p.carrying_capacity / static_cast<prec_t>(p.bins);
    prec_t precision = 1.0 / (p.prior_sigma * p.prior_sigma);
    prec_t weighted = p.prior_mean * precision;
    for (const auto& sample : data.samples) {
        if (sample.sprime == p.bins - 1) continue;  // censored by the capacity clamp
        const prec_t population = midpoint(sample.s);
        const prec_t treated = static_cast<prec_t>(sample.a);
        const prec_t observed_rate = midpoint(sample.sprime) / population;
        const prec_t growth_obs =
            observed_rate + treated * population * p.beta1 +
            treated *
                std::pow(std::max(prec_t(0), population - p.threshold), 2) *
                p.beta2;
        // binning and observation noise propagate into the rate estimate
        const prec_t var = p.growth_sigma * p.growth_sigma +
                           (p.obs_sigma * p.obs_sigma + width * width / 12.0) /
                               (population * population);
        precision += 1.0 / var;
        weighted += growth_obs / var;
    }
    return {weighted / precision, std::sqrt(1.0 / precision)};
}

PosteriorSamples PopulationModel::sample_posterior(const Dataset& data, long m,
                                                   std::uint64_t seed) const {
    const auto& p = params_;
    const auto [mean, stdev] = posterior(data);
    PosteriorSamples out = PosteriorSamples::allocate(p.bins, p.actions, m);
    for (long b = 0; b < p.bins; ++b)
        for (long a = 0; a < p.actions; ++a) out.at(b, a).reserve(m);

    RandomEngine growth_gen = make_engine(seed, {0xF00DULL});
    for (long i = 0; i < m; ++i) {
        const prec_t growth = sample_normal(growth_gen, mean, stdev);
        for (long b = 0; b < p.bins; ++b) {
            for (long a = 0; a < p.actions; ++a) {
                RandomEngine gen = make_engine(
                    seed, {std::uint64_t(i), std::uint64_t(b), std::uint64_t(a)});
                out.at(b, a).push_back(
                    kernel_row(growth, b, a, p.mc_steps_posterior, gen));
            }
        }
    }
    return out;
}

PopulationModel make_population(const PopulationParams& params) {
    return PopulationModel(params);
}

// --- registry ---------------------------------------------------------

std::vector<std::string> builtin_domain_ids() {
    return {"single_state_dirichlet", "single_state_inventory", "riverswim",
            "population"};
}

nlohmann::json default_domain_config(const std::string& id) {
    using nlohmann::json;
    if (id == "single_state_dirichlet") {
        const SingleStateDirichlet d;
        return json{{"terminal_values", d.terminal_values},
                    {"prior_alpha", d.prior_alpha}};
    }
    if (id == "single_state_inventory") {
        const SingleStateInventory d;
        return json{{"terminal_values", d.terminal_values},
                    {"prior_mean", d.prior_mean},
                    {"prior_sigma", d.prior_sigma},
                    {"demand_sigma", d.demand_sigma},
                    {"stock", d.stock}};
    }
    if (id == "riverswim") {
        const RiverSwimSpec spec;
        return json{{"num_states", spec.num_states},
                    {"discount", spec.discount},
                    {"left_reward", spec.left_reward},
                    {"right_reward", spec.right_reward},
                    {"advance", spec.advance},
                    {"stay", spec.stay},
                    {"retreat", spec.retreat},
                    {"edge_stay", spec.edge_stay}};
    }
    if (id == "population") {
        const PopulationParams p;
        return json{{"carrying_capacity", p.carrying_capacity},
                    {"base_growth", p.base_growth},
                    {"beta1", p.beta1},
                    {"beta2", p.beta2},
                    {"threshold", p.threshold},
                    {"growth_sigma", p.growth_sigma},
                    {"obs_sigma", p.obs_sigma},
                    {"bins", p.bins},
                    {"start_bin", p.start_bin},
                    {"pop_cost", p.pop_cost},
                    {"treat_cost", p.treat_cost},
                    {"discount", p.discount},
                    {"prior_mean", p.prior_mean},
                    {"prior_sigma", p.prior_sigma},
                    {"mc_steps_kernel", p.mc_steps_kernel},
                    {"mc_steps_posterior", p.mc_steps_posterior}};
    }
    throw std::invalid_argument("unknown domain: " + id);
}

}  // namespace rmdp
