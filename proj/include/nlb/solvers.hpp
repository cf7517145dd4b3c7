#pragma once

#include "nlb/mdp.hpp"
#include "nlb/transforms.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlb {

/// One value per state; terminal entries are zero.
using ValueVector = std::vector<double>;

/// State-by-action table of q values, row-major.
class ActionValueTable {
public:
    ActionValueTable(std::size_t n_states, std::size_t n_actions)
        : n_states_(n_states), n_actions_(n_actions), values_(n_states * n_actions, 0.0) {}

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }

    double& operator()(std::size_t s, std::size_t a) { return values_[s * n_actions_ + a]; }
    double operator()(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }

    const std::vector<double>& data() const noexcept { return values_; }

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    std::vector<double> values_;
};

struct SolveDiagnostics {
    std::size_t iterations = 0;
    /// Sup-norm Bellman residual of the returned vector.
    double final_residual = 0.0;
    bool converged = false;
    /// Geometric mean of successive residual ratios; NaN when not applicable.
    double empirical_rate = 0.0;
    /// Residual ||T v_i - v_i|| per sweep (fixed_point only).
    std::vector<double> residuals;
    std::vector<std::string> warnings;
};

struct SolveResult {
    ValueVector values;
    SolveDiagnostics diagnostics;
};

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr std::size_t kDefaultMaxIterations = 100'000;
/// Consecutive residual increases that count as divergence.
inline constexpr std::size_t kDivergenceWindow = 100;

/**
 * Exact application of the generalized Bellman operator:
 * (T v)(s) = sum_a pi(a|s) sum_s' p(s'|s,a) sum_r p(r|s,a,s') f(r, v(s')),
 * with v(s') read as zero at terminal successors and terminal rows left at zero.
 */
ValueVector apply_operator(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                           const ValueVector& v);

/// ||T v - v||_inf.
double bellman_residual(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                        const ValueVector& v);

/**
 * Iterates v <- T v until ||T v - v||_inf < tol.
 *
 * The returned vector is the last iterate whose residual was measured, so the
 * stopping criterion holds for it exactly. Throws NonConvergenceError when
 * max_iters is exhausted and DivergenceError after kDivergenceWindow
 * consecutive residual increases (or a non-finite residual).
 */
SolveResult fixed_point(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                        ValueVector v0, double tol = kDefaultTolerance,
                        std::size_t max_iters = kDefaultMaxIterations);

struct TdConfig {
    /// Constant step size in (0, 1]; ignored when visit_decay is set.
    double alpha = 0.05;
    /// Use alpha_n(s) = 1 / n(s), n(s) the number of updates of s so far.
    bool visit_decay = false;
    std::size_t episodes = 10'000;
    std::size_t horizon = 1'000;
    std::uint64_t seed = 0;
    /// Fixed start state; when absent, episodes start uniformly over non-terminal states.
    std::optional<std::size_t> start_state;
    /// Initial table; zeros when empty.
    ValueVector v0;
    /// Bellman-residual level reported as converged.
    double residual_tol = 0.05;
};

/**
 * Tabular TD(0) with a non-linear target:
 * v(S) <- v(S) + alpha (f(R, v(S')) - v(S)), v(terminal) = 0.
 *
 * Episode e draws from RngState(seed).split(e), so results are reproducible.
 * Diagnostics report the number of updates and the exact Bellman residual of
 * the learned table.
 */
SolveResult td0(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                const TdConfig& cfg);

/// q(s, a) = sum_s' p(s'|s,a) sum_r p(r) f(r, v(s')); terminal rows are zero.
ActionValueTable action_values(const Mdp& mdp, const TransformSpec& spec, const ValueVector& v);

/// Deterministic argmax policy; ties go to the lowest action index.
Policy greedy_policy(const ActionValueTable& q);

/**
 * Largest observed ratio ||T v1 - T v2||_inf / ||v1 - v2||_inf over `pairs`
 * random pairs drawn uniformly from [-v_max, v_max]^n (terminal entries zero).
 * Pair i uses RngState(seed).split(i); the result does not depend on how the
 * pairs are scheduled across threads.
 */
double empirical_contraction(const Mdp& mdp, const Policy& policy, const TransformSpec& spec,
                             std::size_t pairs, double v_max, std::uint64_t seed);

/// R_max / (1 - gamma) for gamma < 1, else 10 R_max; R_max is taken as 1 for all-zero rewards.
double default_v_max(const Mdp& mdp, const TransformSpec& spec);

} // namespace nlb
