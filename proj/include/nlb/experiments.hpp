#pragma once

#include "nlb/mdp.hpp"
#include "nlb/returns.hpp"
#include "nlb/solvers.hpp"
#include "nlb/transforms.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlb {

/// A sweep axis. Labels, when present, name the ticks (one per tick).
struct Axis {
    std::string name;
    std::vector<double> ticks;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return ticks.size(); }
    std::string tick_label(std::size_t i) const;
};

/// Rectangular table of sweep values; cells are row-major with the last axis fastest.
struct SweepResult {
    std::vector<Axis> axes;
    std::vector<double> cells;
    std::string value_name = "value";
    std::map<std::string, std::string> metadata;

    std::size_t expected_cells() const;
    double at(std::span<const std::size_t> index) const;
    double at(std::size_t i, std::size_t j) const;
    double at(std::size_t i, std::size_t j, std::size_t k) const;
};

/// Merges every axis except the last into one labeled series axis.
SweepResult flatten_series(const SweepResult& result);

std::vector<double> default_curve_gammas();
/// -10 to 10 in steps of 0.1.
std::vector<double> default_v_grid();

/**
 * Linear (gamma v) and power discount curves, axes (gamma, family, v).
 * The family axis has ticks 0 = linear, 1 = power.
 */
SweepResult discount_curves(std::span<const double> gammas, std::span<const double> v_grid,
                            double kappa = 1.0);

std::vector<double> default_gap_probabilities();
/// 0 to 1 in steps of 0.01.
std::vector<double> default_gap_gammas();

enum class GapMode {
    /// Successor values v(x) = 1 and v(y) = 2/p are injected directly.
    Injected,
    /// Successor values come from solving a 5-state MDP that pays them as terminal rewards.
    Embedded,
};

/**
 * Two-action risk example. State 0 (s) has action 0 (a) leading to state 1
 * (x) and action 1 (b) leading to state 2 (y) with probability p, otherwise
 * to the terminal state 3. Immediate rewards are zero; x and y self-loop.
 */
Mdp gap_example_mdp(double p);
/// The example's value vector (0, 1, 2/p, 0).
ValueVector gap_example_values(double p);
/// Same decision, with x and y paying 1 and 2/p on their way to terminal states 3 and 4.
Mdp gap_embedded_mdp(double p);

/// q(s, b) - q(s, a) for one (p, gamma) cell.
double action_gap(double p, double gamma, DiscountFamily family, double kappa,
                  GapMode mode = GapMode::Injected);

/// Gap table with axes (p, gamma).
SweepResult action_gap_sweep(std::span<const double> p_list, std::span<const double> gamma_grid,
                             DiscountFamily family, double kappa = 1.0,
                             GapMode mode = GapMode::Injected);

std::vector<double> default_ordering_rewards();
std::vector<std::size_t> default_ordering_delays();

struct OrderingGridResult {
    /// Axes (R, T); cell 1 = rules agree, 0 = disagree, -1 = boundary cell.
    SweepResult table;
    std::vector<OrderingVerdict> verdicts;
    std::size_t eligible = 0;
    std::size_t agreeing = 0;
    std::size_t boundary = 0;
    /// Eligible cells where the hyperbolic rule prefers the delayed reward.
    std::size_t prefer_later = 0;
    /// Agreement over eligible cells; empty when no cell is eligible.
    std::optional<double> agreement_fraction;
};

OrderingGridResult ordering_grid(double gamma, double k, double r_ref,
                                 std::span<const double> reward_grid,
                                 std::span<const std::size_t> delay_grid, bool outer_log = false);
OrderingGridResult ordering_grid(double gamma, double k, double r_ref);

} // namespace nlb
