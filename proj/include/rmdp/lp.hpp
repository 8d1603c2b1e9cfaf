#pragma once

#include "rmdp/definitions.hpp"

#include <utility>

namespace rmdp::lp {

/// A linear program in the form
///     min  objective . x
///     s.t. a . x <= b   for (a, b) in less_equal
///          a . x  = b   for (a, b) in equal
///          x >= 0
struct LpProblem {
    std::size_t num_vars = 0;
    numvec objective;
    std::vector<std::pair<numvec, prec_t>> less_equal;
    std::vector<std::pair<numvec, prec_t>> equal;

    numvec& add_less_equal(prec_t rhs) {
        less_equal.emplace_back(numvec(num_vars, 0.0), rhs);
        return less_equal.back().first;
    }
    numvec& add_equal(prec_t rhs) {
        equal.emplace_back(numvec(num_vars, 0.0), rhs);
        return equal.back().first;
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    numvec x;
    prec_t objective = 0;

    bool optimal() const { return status == LpStatus::Optimal; }
};

/// Solves a small dense linear program with a two-phase full-tableau
/// simplex method. Pivots use the largest-coefficient rule and switch to
/// Bland's rule when an iteration budget is exceeded, which rules out
/// cycling on the degenerate programs common here (zero-radius balls).
LpSolution solve_lp(const LpProblem& problem);

}  // namespace rmdp::lp
