#pragma once

#include "nlb/transforms.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace nlb {

/// Rewards R_1, R_2, ... of one episode.
using RewardSequence = std::vector<double>;

/// Half-width of the band around R / r = 1 + k T treated as a tie.
inline constexpr double kOrderingBoundaryBand = 1e-9;

/// T zero rewards followed by R, i.e. the only non-zero reward is R_{T+1}.
RewardSequence sparse_sequence(double reward, std::size_t delay);

/// H = sum_n R_{n+1} / (1 + k n).
double hyperbolic_return(std::span<const double> rewards, double k);

/// sum_n gamma^n R_{n+1}.
double discounted_return(std::span<const double> rewards, double gamma);

/**
 * G = sum_n gamma^n g(R_{n+1}) with the transform's hyperbolic-equivalent g,
 * optionally wrapped in log. Throws DomainError if the transform is not a reward
 * transform or if the log is taken of a non-positive sum.
 */
double transformed_return(std::span<const double> rewards, const TransformSpec& spec,
                          bool outer_log = false);

/// Hyperbolic preference for a delayed reward: R / r_ref > 1 + k T (strict).
bool prefers_later(double reward, std::size_t delay, double r_ref, double k);

struct OrderingVerdict {
    double reward = 0.0;
    std::size_t delay = 0;
    double g_return = 0.0;
    bool prefers_later_by_g = false;
    bool prefers_later_by_hyperbolic = false;
    bool agree = false;
    /// |R / r - 1 - k T| < kOrderingBoundaryBand; excluded from agreement statistics.
    bool boundary = false;
};

/**
 * Evaluates both preference rules on every (R, T) cell, R-major.
 *
 * For the transformed return the comparison is G_0 > r_ref, or
 * log G_0 > log r_ref when outer_log is set.
 */
std::vector<OrderingVerdict> verify_ordering_equivalence(double gamma, double k, double r_ref,
                                                         std::span<const double> reward_grid,
                                                         std::span<const std::size_t> delay_grid,
                                                         bool outer_log = false);

/// Returns of one reward stream under the three discounting schemes; no equivalence is implied.
struct DenseReturnReport {
    double hyperbolic = 0.0;
    double transformed = 0.0;
    /// Backward recursion v_t = (R_{t+1} + v_{t+1}) / (1 + k v_{t+1}) from v = 0 after the last reward.
    double hdtd = 0.0;
};

DenseReturnReport compare_returns(std::span<const double> rewards, double gamma, double k,
                                  double r_ref);

} // namespace nlb
