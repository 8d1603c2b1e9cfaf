#include "rmdp/worstcase.hpp"

#include "rmdp/lp.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rmdp {

namespace {

void check_inputs(const numvec& v, const numvec& p_bar, prec_t psi) {
    if (v.size() != p_bar.size())
        throw std::invalid_argument("worst_case_l1: dimension mismatch");
    if (v.empty()) throw std::invalid_argument("worst_case_l1: empty input");
    if (psi < 0) throw std::invalid_argument("worst_case_l1: negative radius");
    check_probability_vector(p_bar, "worst_case_l1: p_bar", 1e-9);
}

}  // namespace

WorstCaseResult worst_case_l1(const numvec& v, const numvec& p_bar, prec_t psi) {
    check_inputs(v, p_bar, psi);
    const std::size_t n = v.size();

    // ascending by value, lowest index first among ties
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });

    numvec q = p_bar;
    const std::size_t lowest = order.front();
    prec_t remaining = std::min(psi / 2.0, 1.0 - q[lowest]);
    q[lowest] += remaining;

    // strip the same mass from the largest values; among equal values the
    // lowest index donates first, hence the reversed stable order below
    std::vector<std::size_t> desc(n);
    std::iota(desc.begin(), desc.end(), 0);
    std::stable_sort(desc.begin(), desc.end(),
                     [&](std::size_t i, std::size_t j) { return v[i] > v[j]; });
    for (std::size_t idx : desc) {
        if (remaining <= 0) break;
        if (idx == lowest) continue;
        const prec_t take = std::min(remaining, q[idx]);
        q[idx] -= take;
        remaining -= take;
    }
    const prec_t objective = dot(q, v);
    return {std::move(q), objective};
}

WorstCaseResult worst_case_l1(const numvec& v, const numvec& p_bar, prec_t psi,
                              const supportvec& support) {
    if (support.empty()) return worst_case_l1(v, p_bar, psi);
    if (support.size() != v.size())
        throw std::invalid_argument("worst_case_l1: mask dimension mismatch");

    numvec v_sub, p_sub;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!support[i]) {
            if (p_bar[i] != 0.0)
                throw std::invalid_argument(
                    "worst_case_l1: nominal mass on masked-out state");
            continue;
        }
        keep.push_back(i);
        v_sub.push_back(v[i]);
        p_sub.push_back(p_bar[i]);
    }
    if (keep.empty())
        throw std::invalid_argument("worst_case_l1: mask excludes every state");

    WorstCaseResult sub = worst_case_l1(v_sub, p_sub, psi);
    numvec q(v.size(), 0.0);
    for (std::size_t k = 0; k < keep.size(); ++k) q[keep[k]] = sub.q[k];
    return {std::move(q), sub.objective};
}

prec_t worst_case_l1_monotone(const numvec& v, const numvec& p_bar, prec_t psi) {
    check_inputs(v, p_bar, psi);
    const long n = long(v.size());

    lp::LpProblem prob;
    prob.num_vars = v.size();
    prob.objective = v;

    // band constraints, k = 0..n+1; k = 0, 1 and k = n+1 are vacuous on
    // the simplex but kept so the constraint family is exactly as stated
    for (long k = 0; k <= n + 1; ++k) {
        numvec row(n);
        prec_t rhs = psi;
        for (long i = 0; i < n; ++i) {
            row[i] = (i + 1 >= k) ? 1.0 : -1.0;
            rhs += row[i] * p_bar[i];
        }
        prob.less_equal.emplace_back(std::move(row), rhs);
    }
    prob.add_equal(1.0).assign(prob.num_vars, 1.0);

    const lp::LpSolution sol = lp::solve_lp(prob);
    if (!sol.optimal())
        throw std::runtime_error("worst_case_l1_monotone: LP solve failed");
    return sol.objective;
}

}  // namespace rmdp
