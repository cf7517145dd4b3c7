#pragma once

#include "nlb/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlb {

/// Tolerance applied to every probability-sum check.
inline constexpr double kProbabilityTolerance = 1e-12;

struct RewardAtom {
    double value = 0.0;
    double prob = 1.0;
};

/// One successor of a state-action pair, with its reward distribution.
struct Outcome {
    std::size_t next_state = 0;
    double prob = 0.0;
    std::vector<RewardAtom> rewards;

    /// Mean of the reward distribution.
    double mean_reward() const;
};

/**
 * Finite tabular MDP with finite-support rewards.
 *
 * Transitions are stored densely per (state, action). Terminal states carry no
 * outgoing transitions and have value zero. The constructor checks only
 * structure (dimensions and index ranges); probability sums and the terminal
 * convention are checked by validate() so that broken models can still be
 * loaded and reported on.
 */
class Mdp {
public:
    Mdp(std::size_t n_states, std::size_t n_actions, std::vector<bool> terminal,
        std::vector<std::vector<Outcome>> rows);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    bool is_terminal(std::size_t s) const { return terminal_.at(s); }
    const std::vector<bool>& terminal() const noexcept { return terminal_; }
    bool has_terminal_states() const;

    std::span<const Outcome> outcomes(std::size_t s, std::size_t a) const;

    /// Expected immediate reward of taking a in s.
    double expected_reward(std::size_t s, std::size_t a) const;

    /// Largest absolute reward value in any support.
    double max_abs_reward() const;

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    std::vector<bool> terminal_;
    std::vector<std::vector<Outcome>> rows_;
};

/// Incremental construction of an Mdp.
class MdpBuilder {
public:
    MdpBuilder(std::size_t n_states, std::size_t n_actions);

    MdpBuilder& set_terminal(std::size_t s, bool terminal = true);
    MdpBuilder& add(std::size_t s, std::size_t a, std::size_t next_state, double prob,
                    std::vector<RewardAtom> rewards = {{0.0, 1.0}});
    /// Shorthand for a deterministic reward.
    MdpBuilder& add(std::size_t s, std::size_t a, std::size_t next_state, double prob,
                    double reward);

    Mdp build() const;

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    std::vector<bool> terminal_;
    std::vector<std::vector<Outcome>> rows_;
};

struct ActionProb {
    std::size_t action = 0;
    double prob = 0.0;
};

/// Per-state distribution over actions. Terminal states may have empty rows.
class Policy {
public:
    Policy(std::size_t n_actions, std::vector<std::vector<ActionProb>> probs);

    static Policy uniform(const Mdp& mdp);
    static Policy deterministic(std::size_t n_actions, const std::vector<std::size_t>& actions);

    std::size_t n_states() const noexcept { return probs_.size(); }
    std::size_t n_actions() const noexcept { return n_actions_; }
    std::span<const ActionProb> at(std::size_t s) const { return probs_.at(s); }

private:
    std::size_t n_actions_;
    std::vector<std::vector<ActionProb>> probs_;
};

struct Violation {
    std::string message;
    std::optional<std::size_t> state;
    std::optional<std::size_t> action;
};

using ValidationReport = std::vector<Violation>;

/// Empty iff every Mdp invariant holds.
ValidationReport validate(const Mdp& mdp);

/// Checks the policy against the model: sizes, action indices, row sums.
ValidationReport validate(const Mdp& mdp, const Policy& policy);

struct StepSample {
    double reward = 0.0;
    std::size_t next_state = 0;
    bool terminal = false;
    RngState rng;
};

/// Draws (s', r) for a non-terminal state. Throws DomainError on terminal s.
StepSample sample_step(const Mdp& mdp, std::size_t state, std::size_t action, RngState rng);

/// Draws an action from the policy row of a non-terminal state.
std::size_t sample_action(const Policy& policy, std::size_t state, RngState& rng);

struct Step {
    std::size_t state = 0;
    std::size_t action = 0;
    double reward = 0.0;
    std::size_t next_state = 0;
    bool terminal = false;
};

struct Trajectory {
    std::vector<Step> steps;
    std::uint64_t seed = 0;
};

/// Follows the policy until a terminal state or `horizon` steps.
Trajectory rollout(const Mdp& mdp, const Policy& policy, std::size_t start_state,
                   std::size_t horizon, RngState rng);

/// Dense state-to-state transition matrix under the policy, row-major.
std::vector<double> policy_transition_matrix(const Mdp& mdp, const Policy& policy);

/**
 * Steady-state distribution d = d P^pi by power iteration.
 *
 * The iteration runs on the lazy chain (I + P)/2, which has the same
 * stationary distribution but is aperiodic, so periodic ergodic chains still
 * converge. The returned vector satisfies ||d P - d||_1 < tol.
 */
std::vector<double> stationary_distribution(const Mdp& mdp, const Policy& policy, double tol,
                                            std::size_t max_iters = 1'000'000);

} // namespace nlb
