#include "nlb/error.hpp"
#include "nlb/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlb;

namespace {

constexpr std::size_t kLinear = 0;
constexpr std::size_t kPower = 1;

} // namespace

TEST(DiscountCurves, ShapeAndOrder) {
    const std::vector<double> gammas = {0.5, 0.9};
    const std::vector<double> v = {-1.0, 0.0, 2.0};
    const auto r = discount_curves(gammas, v);
    ASSERT_EQ(r.axes.size(), 3u);
    EXPECT_EQ(r.cells.size(), r.expected_cells());
    EXPECT_EQ(r.cells.size(), 12u);
    EXPECT_DOUBLE_EQ(r.at(1, kLinear, 2), 1.8);
    EXPECT_NEAR(r.at(0, kPower, 2), std::sqrt(3.0) - 1.0, 1e-15);
    EXPECT_NEAR(r.at(0, kPower, 0), -(std::sqrt(2.0) - 1.0), 1e-15);
}

TEST(DiscountCurves, PassThroughOrigin) {
    const auto gammas = default_curve_gammas();
    const std::vector<double> v = {0.0};
    const auto r = discount_curves(gammas, v);
    for (double c : r.cells) EXPECT_EQ(c, 0.0);
}

TEST(DiscountCurves, GammaOneIsIdentity) {
    const std::vector<double> gammas = {1.0};
    const auto grid = default_v_grid();
    const auto r = discount_curves(gammas, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(r.at(0, kPower, i), grid[i], 1e-12);
        EXPECT_NEAR(r.at(0, kLinear, i), grid[i], 1e-12);
    }
}

TEST(DiscountCurves, PowerBelowLinearAboveOne) {
    // (v + 1)^gamma - 1 < gamma v for v > 0 by strict concavity.
    const auto gammas = default_curve_gammas();
    const auto grid = default_v_grid();
    const auto r = discount_curves(gammas, grid);
    for (std::size_t g = 0; g < gammas.size(); ++g)
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (grid[i] > 1.0) EXPECT_LT(r.at(g, kPower, i), r.at(g, kLinear, i));
}

TEST(DiscountCurves, RejectsEmptyGrid) {
    const std::vector<double> none;
    const std::vector<double> v = {1.0};
    EXPECT_THROW(discount_curves(none, v), DomainError);
}

TEST(FlattenSeries, LabelsAndCells) {
    const std::vector<double> gammas = {0.5, 0.9};
    const std::vector<double> v = {0.0, 1.0};
    const auto r = discount_curves(gammas, v);
    const auto f = flatten_series(r);
    ASSERT_EQ(f.axes.size(), 2u);
    EXPECT_EQ(f.axes[0].size(), 4u);
    EXPECT_EQ(f.axes[0].labels[1], "gamma=0.5 family=power");
    EXPECT_EQ(f.axes[0].labels[2], "gamma=0.9 family=linear");
    EXPECT_EQ(f.cells, r.cells);
    EXPECT_EQ(f.at(3, 1), r.at(1, kPower, 1));
}

TEST(ActionGap, LinearEqualsGamma) {
    for (double p : default_gap_probabilities())
        for (double gamma : default_gap_gammas())
            EXPECT_NEAR(action_gap(p, gamma, DiscountFamily::Linear, 1.0), gamma, 1e-12);
}

TEST(ActionGap, PowerNegativeForRareJackpot) {
    bool negative = false;
    for (double gamma : default_gap_gammas())
        negative = negative || action_gap(0.05, gamma, DiscountFamily::Power, 1.0) < 0.0;
    EXPECT_TRUE(negative);
}

TEST(ActionGap, PowerClosedFormAtCertainty) {
    for (double gamma : {0.1, 0.5, 0.8}) {
        EXPECT_NEAR(action_gap(1.0, gamma, DiscountFamily::Power, 1.0),
                    std::pow(3.0, gamma) - std::pow(2.0, gamma), 1e-14);
    }
}

TEST(ActionGap, GammaOneRecoversRiskNeutralGap) {
    for (double p : default_gap_probabilities())
        EXPECT_NEAR(action_gap(p, 1.0, DiscountFamily::Power, 1.0), 1.0, 1e-12);
}

TEST(ActionGap, GammaZeroIsFlat) {
    EXPECT_EQ(action_gap(0.3, 0.0, DiscountFamily::Power, 1.0), 0.0);
    EXPECT_EQ(action_gap(0.3, 0.0, DiscountFamily::Linear, 1.0), 0.0);
}

TEST(ActionGap, EmbeddedMatchesInjected) {
    for (double p : default_gap_probabilities()) {
        for (double gamma : {0.0, 0.3, 0.77, 1.0}) {
            for (auto family : {DiscountFamily::Linear, DiscountFamily::Power}) {
                EXPECT_NEAR(action_gap(p, gamma, family, 1.0, GapMode::Embedded),
                            action_gap(p, gamma, family, 1.0, GapMode::Injected), 1e-12)
                    << "p " << p << " gamma " << gamma;
            }
        }
    }
}

TEST(ActionGap, SweepLayoutAndErrors) {
    const auto p = default_gap_probabilities();
    const auto g = default_gap_gammas();
    const auto r = action_gap_sweep(p, g, DiscountFamily::Power);
    EXPECT_EQ(r.cells.size(), p.size() * g.size());
    EXPECT_EQ(r.at(2, 40), action_gap(p[2], g[40], DiscountFamily::Power, 1.0));
    EXPECT_EQ(r.metadata.at("family"), "power");
    EXPECT_THROW(gap_example_mdp(0.0), DomainError);
    EXPECT_THROW(gap_example_mdp(1.5), DomainError);
}

TEST(OrderingGrid, DefaultGridAgreesEverywhere) {
    const auto g = ordering_grid(0.9, 1.0, 1.0);
    EXPECT_EQ(g.table.cells.size(), 19u * 51u);
    EXPECT_EQ(g.eligible + g.boundary, g.table.cells.size());
    EXPECT_GT(g.boundary, 0u);
    EXPECT_GT(g.prefer_later, 0u);
    ASSERT_TRUE(g.agreement_fraction.has_value());
    EXPECT_EQ(*g.agreement_fraction, 1.0);
}

TEST(OrderingGrid, AllBoundaryHasNoFraction) {
    const std::vector<double> rewards = {2.0};
    const std::vector<std::size_t> delays = {1};
    const auto g = ordering_grid(0.9, 1.0, 1.0, rewards, delays);
    EXPECT_EQ(g.eligible, 0u);
    EXPECT_EQ(g.boundary, 1u);
    EXPECT_FALSE(g.agreement_fraction.has_value());
    EXPECT_EQ(g.table.cells.front(), -1.0);
}

TEST(OrderingGrid, OuterLogSameVerdicts) {
    const auto rewards = default_ordering_rewards();
    const auto delays = default_ordering_delays();
    const auto a = ordering_grid(0.5, 0.5, 1.0, rewards, delays);
    const auto b = ordering_grid(0.5, 0.5, 1.0, rewards, delays, true);
    EXPECT_EQ(a.table.cells, b.table.cells);
}
