#pragma once

#include "nlb/mdp.hpp"
#include "nlb/rng.hpp"

#include <cstddef>
#include <span>

namespace nlb {

/// Deterministic chain 0 -> 1 -> ... -> n with rewards[i] on leaving i; state n is terminal.
Mdp chain_mdp(std::span<const double> rewards);

/// Episode of T zero rewards followed by a single reward R on termination (reward index T).
Mdp sparse_chain_mdp(double reward, std::size_t delay);

/// One state per entry, each a deterministic self-loop paying its reward.
Mdp self_loop_mdp(std::span<const double> rewards);

struct RandomMdpOptions {
    std::size_t n_states = 5;
    std::size_t n_actions = 2;
    /// The last `n_terminal` states are terminal.
    std::size_t n_terminal = 0;
    /// Non-terminal successors per state-action pair (capped at the number available).
    std::size_t branching = 3;
    std::size_t reward_atoms = 2;
    double reward_min = -1.0;
    double reward_max = 1.0;
    /// Probability mass sent to a terminal state, drawn per row from this range.
    double terminal_prob_min = 0.0;
    double terminal_prob_max = 0.0;
};

Mdp random_mdp(const RandomMdpOptions& options, RngState rng);

/**
 * Random deterministic chain of `length` non-terminal states with rewards
 * uniform in [reward_min, reward_max]. If `loop_back` is set the last state
 * jumps back to a random earlier state; otherwise it leads to a terminal state.
 */
Mdp random_chain_mdp(std::size_t length, double reward_min, double reward_max, bool loop_back,
                     RngState rng);

} // namespace nlb
