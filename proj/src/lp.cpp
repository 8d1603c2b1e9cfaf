#include "rmdp/lp.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace rmdp::lp {

namespace {

constexpr prec_t REDCOST_TOL = 1e-9;
constexpr prec_t PIVOT_TOL = 1e-9;
constexpr prec_t FEAS_TOL = 1e-7;

/// Full-tableau simplex state. Rows 0..m-1 hold the constraints, the
/// last row holds reduced costs; the last column holds the right-hand
/// side (and the negated objective value in the cost row).
struct Tableau {
    std::size_t m = 0;       // constraint rows
    std::size_t cols = 0;    // columns excluding rhs
    std::vector<numvec> t;   // (m+1) x (cols+1)
    std::vector<std::size_t> basis;

    prec_t& at(std::size_t i, std::size_t j) { return t[i][j]; }
    prec_t& rhs(std::size_t i) { return t[i][cols]; }
    numvec& cost_row() { return t[m]; }

    void pivot(std::size_t row, std::size_t col) {
        const prec_t piv = t[row][col];
        for (prec_t& v : t[row]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == row) continue;
            const prec_t factor = t[i][col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= factor * t[row][j];
            t[i][col] = 0.0;  // cancel exactly
        }
        basis[row] = col;
    }

    /// Runs simplex iterations on the current cost row. `allowed(j)` says
    /// whether column j may enter the basis.
    template <class Allowed>
    LpStatus iterate(Allowed allowed, std::size_t max_iter) {
        const std::size_t bland_after = max_iter / 2;
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            const bool bland = iter >= bland_after;

            // entering column
            std::size_t enter = cols;
            prec_t best = -REDCOST_TOL;
            for (std::size_t j = 0; j < cols; ++j) {
                if (!allowed(j)) continue;
                const prec_t c = t[m][j];
                if (c < best) {
                    enter = j;
                    if (bland) break;  // first eligible index
                    best = c;
                }
            }
            if (enter == cols) return LpStatus::Optimal;

            // leaving row: minimal ratio, ties broken by smallest basis index
            std::size_t leave = m;
            prec_t best_ratio = std::numeric_limits<prec_t>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                const prec_t a = t[i][enter];
                if (a <= PIVOT_TOL) continue;
                const prec_t ratio = rhs(i) / a;
                if (ratio < best_ratio - PIVOT_TOL ||
                    (ratio < best_ratio + PIVOT_TOL &&
                     (leave == m || basis[i] < basis[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave == m) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
        return LpStatus::IterationLimit;
    }
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
    const std::size_t n = problem.num_vars;
    const std::size_t n_ub = problem.less_equal.size();
    const std::size_t n_eq = problem.equal.size();
    const std::size_t m = n_ub + n_eq;

    // Count slack/surplus and artificial columns. Rows with a negative
    // right-hand side are flipped so every rhs is nonnegative.
    std::size_t n_art = n_eq;
    for (const auto& [a, b] : problem.less_equal)
        if (b < 0) ++n_art;

    Tableau tab;
    tab.m = m;
    tab.cols = n + n_ub + n_art;
    tab.t.assign(m + 1, numvec(tab.cols + 1, 0.0));
    tab.basis.assign(m, 0);

    const std::size_t slack0 = n;
    const std::size_t art0 = n + n_ub;
    std::size_t art = art0;

    // rows are equilibrated to unit max-coefficient so the fixed pivot
    // tolerances stay meaningful when constraints mix scales
    const auto row_scale = [](const numvec& a) {
        prec_t scale = 0;
        for (prec_t x : a) scale = std::max(scale, std::abs(x));
        return scale > 0 ? scale : prec_t(1);
    };

    for (std::size_t i = 0; i < n_ub; ++i) {
        const auto& [a, b] = problem.less_equal[i];
        assert(a.size() == n);
        const prec_t scale = row_scale(a);
        const prec_t sign = (b < 0) ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * a[j] / scale;
        tab.rhs(i) = sign * b / scale;
        tab.at(i, slack0 + i) = sign;  // slack, or surplus when flipped
        if (b < 0) {
            tab.at(i, art) = 1.0;
            tab.basis[i] = art++;
        } else {
            tab.basis[i] = slack0 + i;
        }
    }
    for (std::size_t k = 0; k < n_eq; ++k) {
        const std::size_t i = n_ub + k;
        const auto& [a, b] = problem.equal[k];
        assert(a.size() == n);
        const prec_t scale = row_scale(a);
        const prec_t sign = (b < 0) ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) tab.at(i, j) = sign * a[j] / scale;
        tab.rhs(i) = sign * b / scale;
        tab.at(i, art) = 1.0;
        tab.basis[i] = art++;
    }
    assert(art == n + n_ub + n_art);

    const std::size_t max_iter = 2000 + 400 * (m + tab.cols);
    const auto is_artificial = [&](std::size_t j) { return j >= art0; };

    // Phase 1: minimize the sum of artificial variables.
    if (n_art > 0) {
        for (std::size_t j = art0; j < tab.cols; ++j) tab.cost_row()[j] = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_artificial(tab.basis[i])) continue;
            for (std::size_t j = 0; j <= tab.cols; ++j)
                tab.cost_row()[j] -= tab.t[i][j];
        }
        const LpStatus st =
            tab.iterate([](std::size_t) { return true; }, max_iter);
        if (st == LpStatus::IterationLimit) return {st, {}, 0};
        const prec_t infeas = -tab.cost_row()[tab.cols];
        if (infeas > FEAS_TOL) return {LpStatus::Infeasible, {}, 0};

        // Pivot remaining artificials out of the basis; rows where that is
        // impossible are linearly dependent and harmless at rhs zero.
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_artificial(tab.basis[i])) continue;
            for (std::size_t j = 0; j < art0; ++j) {
                if (std::abs(tab.t[i][j]) > 1e-8) {
                    tab.pivot(i, j);
                    break;
                }
            }
        }
    }

    // Phase 2: original objective (scaled to unit max), artificials barred.
    prec_t obj_scale = 0;
    for (prec_t c : problem.objective) obj_scale = std::max(obj_scale, std::abs(c));
    if (obj_scale <= 0) obj_scale = 1.0;
    std::fill(tab.cost_row().begin(), tab.cost_row().end(), 0.0);
    for (std::size_t j = 0; j < n; ++j)
        tab.cost_row()[j] = problem.objective[j] / obj_scale;
    for (std::size_t i = 0; i < m; ++i) {
        const prec_t c = tab.cost_row()[tab.basis[i]];
        if (c == 0.0) continue;
        for (std::size_t j = 0; j <= tab.cols; ++j)
            tab.cost_row()[j] -= c * tab.t[i][j];
    }
    const LpStatus st = tab.iterate(
        [&](std::size_t j) { return !is_artificial(j); }, max_iter);
    if (st != LpStatus::Optimal) return {st, {}, 0};

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (tab.basis[i] < n) sol.x[tab.basis[i]] = tab.rhs(i);
    for (prec_t x : sol.x)
        if (!std::isfinite(x)) return {LpStatus::IterationLimit, {}, 0};
    sol.objective = dot(sol.x, problem.objective);
    return sol;
}

}  // namespace rmdp::lp
