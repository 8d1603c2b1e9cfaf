#include "rmdp/rsvf.hpp"

#include "rmdp/lp.hpp"
#include "rmdp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmdp {

namespace {
constexpr prec_t TERMINATION_SLACK = 1e-9;
}

bool SafetyHalfspace::feasible() const {
    return g >= *std::min_element(v.cbegin(), v.cend()) - 1e-12;
}

prec_t quantile_threshold_g(const std::vector<numvec>& samples_sa, const numvec& v,
                            prec_t zeta) {
    if (samples_sa.empty())
        throw std::invalid_argument("quantile_threshold_g: no posterior draws");
    if (zeta <= 0 || zeta >= 1)
        throw std::invalid_argument("quantile_threshold_g: zeta must lie in (0,1)");
    const long m = long(samples_sa.size());
    numvec values;
    values.reserve(m);
    for (const numvec& q : samples_sa) values.push_back(dot(q, v));
    std::sort(values.begin(), values.end());
    // largest g = y_(j) with at least zeta*m values above it:
    // j = floor(m (1 - zeta)) + 1 in ascending 1-based order
    long j = static_cast<long>(
                 std::floor(static_cast<prec_t>(m) * (1.0 - zeta) + 1e-9)) +
             1;
    j = std::clamp(j, 1L, m);
    return values[j - 1];
}

HalfspaceDistance dist_to_halfspace(const numvec& p, const SafetyHalfspace& h) {
    if (p.size() != h.v.size())
        throw std::invalid_argument("dist_to_halfspace: dimension mismatch");
    check_probability_vector(p, "dist_to_halfspace: p", 1e-9);
    if (!h.feasible())
        throw EmptyHalfspaceError("dist_to_halfspace: empty half-space, g < min(v)");

    HalfspaceDistance res;
    res.q = p;
    prec_t excess = dot(p, h.v) - h.g;
    if (excess <= 0) return res;

    // receiving state: lowest value, lowest index among ties
    const std::size_t target =
        std::min_element(h.v.cbegin(), h.v.cend()) - h.v.cbegin();

    // donors in descending value order, lowest index first among ties
    std::vector<std::size_t> desc(p.size());
    std::iota(desc.begin(), desc.end(), 0);
    std::stable_sort(desc.begin(), desc.end(),
                     [&](std::size_t i, std::size_t j) { return h.v[i] > h.v[j]; });

    prec_t moved = 0;
    for (std::size_t idx : desc) {
        if (excess <= 0) break;
        if (idx == target) continue;
        const prec_t gain = h.v[idx] - h.v[target];
        if (gain <= 0) break;
        const prec_t mass = std::min(res.q[idx], excess / gain);
        res.q[idx] -= mass;
        res.q[target] += mass;
        moved += mass;
        excess -= mass * gain;
    }
    res.d = 2.0 * moved;
    return res;
}

namespace {

/// Builds the minimax-center linear program. Variable layout:
/// p (n), psi (1), then per half-space q_h (n) and u_h (n) where
/// u_h >= max(p - q_h, 0) and sum(u_h) <= psi / 2 encodes the L1 bound.
lp::LpProblem build_center_lp(const std::vector<SafetyHalfspace>& halfspaces,
                              std::size_t n) {
    const std::size_t H = halfspaces.size();
    lp::LpProblem prob;
    prob.num_vars = n + 1 + 2 * n * H;
    prob.objective.assign(prob.num_vars, 0.0);

    const std::size_t psi_ix = n;
    const auto q_ix = [&](std::size_t h, std::size_t i) {
        return n + 1 + h * 2 * n + i;
    };
    const auto u_ix = [&](std::size_t h, std::size_t i) {
        return n + 1 + h * 2 * n + n + i;
    };

    {  // sum(p) = 1
        numvec& row = prob.add_equal(1.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = 1.0;
    }
    for (std::size_t h = 0; h < H; ++h) {
        {  // sum(q_h) = 1
            numvec& row = prob.add_equal(1.0);
            for (std::size_t i = 0; i < n; ++i) row[q_ix(h, i)] = 1.0;
        }
        {  // q_h . v_h <= g_h
            numvec& row = prob.add_less_equal(halfspaces[h].g);
            for (std::size_t i = 0; i < n; ++i) row[q_ix(h, i)] = halfspaces[h].v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {  // p_i - q_hi - u_hi <= 0
            numvec& row = prob.add_less_equal(0.0);
            row[i] = 1.0;
            row[q_ix(h, i)] = -1.0;
            row[u_ix(h, i)] = -1.0;
        }
        {  // sum(u_h) <= psi / 2
            numvec& row = prob.add_less_equal(0.0);
            for (std::size_t i = 0; i < n; ++i) row[u_ix(h, i)] = 1.0;
            row[psi_ix] = -0.5;
        }
    }
    return prob;
}

/// Pulls the p-block out of an LP solution and normalizes it; rejects
/// numerically damaged solutions so the caller can fall back.
bool extract_center(const lp::LpSolution& sol, std::size_t n, numvec& theta) {
    if (!sol.optimal()) return false;
    theta.assign(sol.x.cbegin(), sol.x.cbegin() + n);
    prec_t total = 0;
    for (prec_t& x : theta) {
        if (!std::isfinite(x) || x < -1e-6) return false;
        x = std::max(x, prec_t(0));
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-6) return false;
    for (prec_t& x : theta) x /= total;
    return true;
}

}  // namespace

MinimaxCenter minimax_center(const std::vector<SafetyHalfspace>& halfspaces) {
    if (halfspaces.empty())
        throw std::invalid_argument("minimax_center: no half-spaces given");
    const std::size_t n = halfspaces.front().v.size();
    std::vector<SafetyHalfspace> scaled;
    scaled.reserve(halfspaces.size());
    for (const auto& h : halfspaces) {
        if (h.v.size() != n)
            throw std::invalid_argument("minimax_center: dimension mismatch");
        if (!h.feasible())
            throw EmptyHalfspaceError("minimax_center: empty half-space");
        // the half-space is invariant to jointly rescaling (v, g); unit
        // magnitude keeps the linear program well conditioned
        prec_t scale = 0;
        for (prec_t x : h.v) scale = std::max(scale, std::abs(x));
        if (scale <= 0) scale = 1.0;
        SafetyHalfspace hs = h;
        for (prec_t& x : hs.v) x /= scale;
        hs.g /= scale;
        scaled.push_back(std::move(hs));
    }

    lp::LpProblem prob = build_center_lp(scaled, n);
    const std::size_t psi_ix = n;

    prob.objective[psi_ix] = 1.0;
    const lp::LpSolution stage1 = lp::solve_lp(prob);
    if (!stage1.optimal())
        throw std::runtime_error("minimax_center: LP solve failed");
    const prec_t psi_opt = std::max(prec_t(0), stage1.x[psi_ix]);

    // Tie-break among optimal centers: maximize alignment with the value
    // functions while keeping the radius optimal.
    prob.objective[psi_ix] = 0.0;
    for (const auto& h : scaled)
        for (std::size_t i = 0; i < n; ++i) prob.objective[i] -= h.v[i];
    prob.add_less_equal(psi_opt + 1e-9)[psi_ix] = 1.0;
    const lp::LpSolution stage2 = lp::solve_lp(prob);

    MinimaxCenter out;
    if (!extract_center(stage2, n, out.theta) &&
        !extract_center(stage1, n, out.theta))
        throw std::runtime_error("minimax_center: LP solve failed");

    // Store the radius the center actually achieves. It cannot exceed the
    // LP optimum by more than the stage-two slack, and making the pair
    // (theta, psi) exactly consistent keeps the later intersection tests
    // off the tolerance boundary.
    out.psi = 0;
    for (const auto& h : halfspaces)
        out.psi = std::max(out.psi, dist_to_halfspace(out.theta, h).d);
    return out;
}

bool termination_check(const numvec& theta, prec_t psi, const SafetyHalfspace& h) {
    return dist_to_halfspace(theta, h).d <= psi + TERMINATION_SLACK;
}

namespace {

struct PairSets {
    std::vector<std::vector<numvec>> theta;  // [s][a][s']
    std::vector<numvec> psi;                 // [s][a]
};

bool duplicate_in_pov(const std::vector<numvec>& pov, const numvec& v) {
    for (const numvec& u : pov)
        if (linf_distance(u, v) <= 1e-12) return true;
    return false;
}

}  // namespace

RsvfResult rsvf_solve(const std::vector<numvec>& rewards, prec_t gamma,
                      const numvec& initial_dist, const PosteriorSamples& samples,
                      prec_t delta, long max_iter, prec_t tol) {
    if (delta <= 0 || delta >= 1)
        throw std::invalid_argument("rsvf_solve: delta must lie in (0,1)");
    if (max_iter < 1)
        throw std::invalid_argument("rsvf_solve: max_iter must be positive");
    const long S = samples.num_states;
    const long A = samples.num_actions;
    const prec_t zeta =
        1.0 - delta / (static_cast<prec_t>(S) * static_cast<prec_t>(A));

    // initial candidate: optimal value function of the posterior-mean model
    TabularMdp mean_mdp{S, A, rewards, posterior_mean(samples), gamma, initial_dist};
    mean_mdp.validate();
    numvec v_hat = value_iteration(mean_mdp, tol).value;

    std::vector<numvec> pov;                      // candidate value functions
    std::vector<std::vector<numvec>> g_cache;     // per candidate: [s][a]
    const auto push_candidate = [&](const numvec& v) {
        pov.push_back(v);
        std::vector<numvec> g(S, numvec(A, 0.0));
        for (long s = 0; s < S; ++s)
            for (long a = 0; a < A; ++a)
                g[s][a] = quantile_threshold_g(samples.at(s, a), v, zeta);
        g_cache.push_back(std::move(g));
    };

    RsvfResult res;
    auto& diag = res.diagnostics;
    diag.termination_status.assign(S, std::vector<std::uint8_t>(A, 0));
    diag.fallback_pairs.assign(S, std::vector<std::uint8_t>(A, 0));

    PairSets sets;
    sets.theta.assign(S, std::vector<numvec>(A));
    sets.psi.assign(S, numvec(A, 0.0));

    const auto solve_with_sets = [&]() {
        AmbiguitySet amb = AmbiguitySet::create(sets.theta, sets.psi);
        Solution sol = robust_value_iteration(rewards, gamma, amb, tol);
        res.policy = std::move(sol.policy);
        res.value = std::move(sol.value);
        res.sets = std::move(amb);
        diag.objective_trace.push_back(total_return(res.value, initial_dist));
    };

    // each pass: grow the candidate set, rebuild the balls, re-solve, and
    // test per pair whether the ball reaches the new optimum's half-space
    for (long k = 0; k < max_iter; ++k) {
        if (duplicate_in_pov(pov, v_hat)) {
            if (k > 0) break;  // fixed point that still fails the test
        } else {
            push_candidate(v_hat);
        }

        for (long s = 0; s < S; ++s) {
            for (long a = 0; a < A; ++a) {
                std::vector<SafetyHalfspace> halfspaces;
                halfspaces.reserve(pov.size());
                for (std::size_t i = 0; i < pov.size(); ++i)
                    halfspaces.push_back({pov[i], g_cache[i][s][a], s, a});
                MinimaxCenter center = minimax_center(halfspaces);
                sets.theta[s][a] = std::move(center.theta);
                sets.psi[s][a] = center.psi;
            }
        }

        solve_with_sets();
        v_hat = res.value;
        diag.iterations = k + 1;

        bool all_safe = true;
        for (long s = 0; s < S; ++s) {
            for (long a = 0; a < A; ++a) {
                const SafetyHalfspace k_sa{
                    v_hat, quantile_threshold_g(samples.at(s, a), v_hat, zeta), s, a};
                diag.termination_status[s][a] =
                    termination_check(sets.theta[s][a], sets.psi[s][a], k_sa);
                all_safe = all_safe && diag.termination_status[s][a];
            }
        }
        if (all_safe) {
            diag.terminated = true;
            diag.psi = sets.psi;
            diag.theta = sets.theta;
            res.safe_return = total_return(res.value, initial_dist);
            return res;
        }
    }

    // Fallback: pairs failing the intersection test switch to their
    // Bayesian credible balls, which are safe for any value function.
    // Re-solving can surface new failing pairs, so repeat until the final
    // check passes everywhere; each pass converts at least one more pair.
    const prec_t delta_sa = delta / (static_cast<prec_t>(S) * A);
    diag.fallback_used = true;
    for (long pass = 0; pass < S * A + 1; ++pass) {
        bool converted = false;
        for (long s = 0; s < S; ++s) {
            for (long a = 0; a < A; ++a) {
                if (diag.termination_status[s][a] || diag.fallback_pairs[s][a])
                    continue;
                CredibleBall ball = bci_radius(samples.at(s, a), delta_sa);
                sets.theta[s][a] = std::move(ball.center);
                sets.psi[s][a] = ball.psi;
                diag.fallback_pairs[s][a] = 1;
                converted = true;
            }
        }
        if (!converted) break;

        solve_with_sets();
        v_hat = res.value;

        bool all_safe = true;
        for (long s = 0; s < S; ++s) {
            for (long a = 0; a < A; ++a) {
                const SafetyHalfspace k_sa{
                    v_hat, quantile_threshold_g(samples.at(s, a), v_hat, zeta), s, a};
                diag.termination_status[s][a] =
                    termination_check(sets.theta[s][a], sets.psi[s][a], k_sa);
                all_safe = all_safe && diag.termination_status[s][a];
            }
        }
        if (all_safe) break;
    }

    res.safe_return = total_return(res.value, initial_dist);
    diag.psi = sets.psi;
    diag.theta = sets.theta;
    return res;
}

}  // namespace rmdp
