#pragma once

#include "rmdp/definitions.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rmdp {

/// Random engine used everywhere. mt19937_64 has a bit-stable output
/// sequence, so results are reproducible for a fixed seed.
using RandomEngine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a list of
/// tags (state index, action index, replication number, ...). All
/// randomness in the library flows from one master seed through this
/// function.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t t : tags)
        h = splitmix64(h ^ splitmix64(t + 0x9E3779B97F4A7C15ULL));
    return h;
}

inline RandomEngine make_engine(std::uint64_t master,
                                std::initializer_list<std::uint64_t> tags) {
    return RandomEngine(derive_seed(master, tags));
}

// Samplers below avoid std::*_distribution so the generated sequences do
// not depend on the standard library implementation.

/// Uniform draw in [0, 1) with 53 bits of precision.
inline prec_t uniform01(RandomEngine& gen) {
    return static_cast<prec_t>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal draw (Box-Muller, cosine branch only).
inline prec_t sample_normal(RandomEngine& gen) {
    prec_t u1 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    const prec_t u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline prec_t sample_normal(RandomEngine& gen, prec_t mean, prec_t stdev) {
    return mean + stdev * sample_normal(gen);
}

/// Gamma(shape, 1) draw using the Marsaglia-Tsang squeeze method.
inline prec_t sample_gamma(RandomEngine& gen, prec_t shape) {
    if (shape <= 0) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        // boost: Gamma(a) = Gamma(a + 1) * U^{1/a}
        const prec_t u = std::max(uniform01(gen), 1e-300);
        return sample_gamma(gen, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const prec_t d = shape - 1.0 / 3.0;
    const prec_t c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        prec_t x, v;
        do {
            x = sample_normal(gen);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const prec_t u = uniform01(gen);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

/// Dirichlet draw via normalized independent gamma variables.
inline numvec sample_dirichlet(RandomEngine& gen, const numvec& alpha) {
    numvec x(alpha.size());
    prec_t total = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        x[i] = sample_gamma(gen, alpha[i]);
        total += x[i];
    }
    if (total <= 0) {  // all draws underflowed; fall back to the mode
        std::fill(x.begin(), x.end(), 1.0 / static_cast<prec_t>(x.size()));
        return x;
    }
    for (prec_t& v : x) v /= total;
    return x;
}

/// Categorical draw from a probability vector by CDF inversion.
inline long sample_categorical(RandomEngine& gen, const numvec& p) {
    const prec_t u = uniform01(gen);
    prec_t cum = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return static_cast<long>(i);
    }
    return static_cast<long>(p.size()) - 1;
}

}  // namespace rmdp
