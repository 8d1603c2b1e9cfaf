#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmdp {

/// Default precision type used throughout the library
using prec_t = double;
/// Vector of real values
using numvec = std::vector<prec_t>;
/// Vector of indices (states or actions)
using indexvec = std::vector<long>;
/// Vector of sample counts
using countvec = std::vector<long>;

/// Tolerance for checking that probabilities sum to one
constexpr prec_t SIMPLEX_TOL = 1e-12;
/// Default stopping tolerance of iterative solvers, in return units
constexpr prec_t DEFAULT_TOL = 1e-6;

inline prec_t dot(const numvec& a, const numvec& b) {
    return std::inner_product(a.cbegin(), a.cend(), b.cbegin(), prec_t(0));
}

inline prec_t l1_distance(const numvec& a, const numvec& b) {
    prec_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += std::abs(a[i] - b[i]);
    return d;
}

inline prec_t linf_distance(const numvec& a, const numvec& b) {
    prec_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Whether p is a probability vector: nonnegative entries summing to one
/// within the given tolerance.
inline bool is_probability_vector(const numvec& p, prec_t tol = SIMPLEX_TOL) {
    prec_t sum = 0;
    for (prec_t x : p) {
        if (x < -tol || !std::isfinite(x)) return false;
        sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
}

inline void check_probability_vector(const numvec& p, const std::string& what,
                                     prec_t tol = SIMPLEX_TOL) {
    if (!is_probability_vector(p, tol))
        throw std::invalid_argument(what + ": not a probability distribution");
}

}  // namespace rmdp
