#include "nlb/generators.hpp"

#include "nlb/error.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace nlb {

namespace {

// Positive weights normalized so that they sum to `mass`, last entry absorbing round-off.
std::vector<double> random_simplex(std::size_t n, double mass, RngState& rng) {
    std::vector<double> w(n);
    for (auto& x : w) x = rng.uniform(0.1, 1.0);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        w[i] = mass * w[i] / total;
        acc += w[i];
    }
    w[n - 1] = mass - acc;
    return w;
}

} // namespace

Mdp chain_mdp(std::span<const double> rewards) {
    const std::size_t n = rewards.size();
    MdpBuilder b(n + 1, 1);
    for (std::size_t i = 0; i < n; ++i) b.add(i, 0, i + 1, 1.0, rewards[i]);
    b.set_terminal(n);
    return b.build();
}

Mdp sparse_chain_mdp(double reward, std::size_t delay) {
    std::vector<double> rewards(delay + 1, 0.0);
    rewards.back() = reward;
    return chain_mdp(rewards);
}

Mdp self_loop_mdp(std::span<const double> rewards) {
    MdpBuilder b(rewards.size(), 1);
    for (std::size_t i = 0; i < rewards.size(); ++i) b.add(i, 0, i, 1.0, rewards[i]);
    return b.build();
}

Mdp random_mdp(const RandomMdpOptions& opt, RngState rng) {
    if (opt.n_terminal >= opt.n_states) {
        throw DomainError("random mdp needs at least one non-terminal state");
    }
    const std::size_t live = opt.n_states - opt.n_terminal;
    const bool to_terminal = opt.n_terminal > 0 && opt.terminal_prob_max > 0.0;
    MdpBuilder b(opt.n_states, opt.n_actions);
    for (std::size_t s = live; s < opt.n_states; ++s) b.set_terminal(s);

    std::vector<std::size_t> candidates(live);
    for (std::size_t s = 0; s < live; ++s) {
        for (std::size_t a = 0; a < opt.n_actions; ++a) {
            std::iota(candidates.begin(), candidates.end(), std::size_t{0});
            const std::size_t k = std::clamp<std::size_t>(opt.branching, 1, live);
            // Partial Fisher-Yates for k distinct successors.
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t j = i + rng.below(live - i);
                std::swap(candidates[i], candidates[j]);
            }
            const double q =
                to_terminal ? rng.uniform(opt.terminal_prob_min, opt.terminal_prob_max) : 0.0;
            const auto probs = random_simplex(k, 1.0 - q, rng);

            auto rewards = [&] {
                std::vector<RewardAtom> atoms;
                const auto rp = random_simplex(std::max<std::size_t>(opt.reward_atoms, 1), 1.0, rng);
                for (double p : rp) atoms.push_back({rng.uniform(opt.reward_min, opt.reward_max), p});
                return atoms;
            };
            for (std::size_t i = 0; i < k; ++i) b.add(s, a, candidates[i], probs[i], rewards());
            if (q > 0.0) b.add(s, a, live + rng.below(opt.n_terminal), q, rewards());
        }
    }
    return b.build();
}

Mdp random_chain_mdp(std::size_t length, double reward_min, double reward_max, bool loop_back,
                     RngState rng) {
    if (length == 0) throw DomainError("chain length must be positive");
    MdpBuilder b(length + 1, 1);
    b.set_terminal(length);
    for (std::size_t i = 0; i + 1 < length; ++i) {
        b.add(i, 0, i + 1, 1.0, rng.uniform(reward_min, reward_max));
    }
    const std::size_t last_target = loop_back ? rng.below(length) : length;
    b.add(length - 1, 0, last_target, 1.0, rng.uniform(reward_min, reward_max));
    return b.build();
}

} // namespace nlb
