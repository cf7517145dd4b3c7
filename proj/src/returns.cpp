#include "nlb/returns.hpp"

#include "nlb/error.hpp"

#include <cmath>

namespace nlb {

RewardSequence sparse_sequence(double reward, std::size_t delay) {
    RewardSequence seq(delay + 1, 0.0);
    seq.back() = reward;
    return seq;
}

double hyperbolic_return(std::span<const double> rewards, double k) {
    if (!(k > 0.0)) throw DomainError("hyperbolic return: k must be positive");
    double h = 0.0;
    for (std::size_t n = 0; n < rewards.size(); ++n) {
        h += rewards[n] / (1.0 + k * static_cast<double>(n));
    }
    return h;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double g = 0.0;
    for (std::size_t n = rewards.size(); n-- > 0;) g = rewards[n] + gamma * g;
    return g;
}

double transformed_return(std::span<const double> rewards, const TransformSpec& spec,
                          bool outer_log) {
    if (spec.kind() != TransformKind::RewardTransform) {
        throw DomainError("transformed return needs a reward transform spec");
    }
    double g = 0.0;
    for (std::size_t n = 0; n < rewards.size(); ++n) {
        if (rewards[n] == 0.0) continue;
        g += std::pow(spec.gamma(), static_cast<double>(n)) * hyperbolic_equivalent_g(spec, rewards[n]);
    }
    if (!outer_log) return g;
    if (!(g > 0.0)) throw DomainError("log of a non-positive transformed return");
    return std::log(g);
}

bool prefers_later(double reward, std::size_t delay, double r_ref, double k) {
    return reward / r_ref > 1.0 + k * static_cast<double>(delay);
}

std::vector<OrderingVerdict> verify_ordering_equivalence(double gamma, double k, double r_ref,
                                                         std::span<const double> reward_grid,
                                                         std::span<const std::size_t> delay_grid,
                                                         bool outer_log) {
    if (reward_grid.empty() || delay_grid.empty()) {
        throw DomainError("ordering grids must be non-empty");
    }
    const auto spec = TransformSpec::hyperbolic_reward(gamma, k, r_ref);
    const double threshold = outer_log ? std::log(r_ref) : r_ref;

    std::vector<OrderingVerdict> verdicts;
    verdicts.reserve(reward_grid.size() * delay_grid.size());
    for (double reward : reward_grid) {
        for (std::size_t delay : delay_grid) {
            OrderingVerdict v;
            v.reward = reward;
            v.delay = delay;
            v.g_return = transformed_return(sparse_sequence(reward, delay), spec, outer_log);
            v.prefers_later_by_g = v.g_return > threshold;
            v.prefers_later_by_hyperbolic = prefers_later(reward, delay, r_ref, k);
            v.agree = v.prefers_later_by_g == v.prefers_later_by_hyperbolic;
            v.boundary = std::abs(reward / r_ref - 1.0 - k * static_cast<double>(delay)) <
                         kOrderingBoundaryBand;
            verdicts.push_back(v);
        }
    }
    return verdicts;
}

DenseReturnReport compare_returns(std::span<const double> rewards, double gamma, double k,
                                  double r_ref) {
    DenseReturnReport report;
    report.hyperbolic = hyperbolic_return(rewards, k);
    report.transformed =
        transformed_return(rewards, TransformSpec::hyperbolic_reward(gamma, k, r_ref));
    const auto hdtd = TransformSpec::hdtd(k);
    double v = 0.0;
    for (std::size_t n = rewards.size(); n-- > 0;) v = eval_target(hdtd, rewards[n], v);
    report.hdtd = v;
    return report;
}

} // namespace nlb
