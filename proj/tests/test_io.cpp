#include "nlb/error.hpp"
#include "nlb/generators.hpp"
#include "nlb/io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <regex>

using namespace nlb;

namespace {

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

SweepResult grid2x2() {
    SweepResult r;
    r.value_name = "z";
    r.axes = {Axis{"a", {1.0, 2.0}, {}}, Axis{"b", {0.1, 0.2}, {"lo", "hi"}}};
    r.cells = {1.0 / 3.0, -2.5, 1e-300, 7.0};
    return r;
}

} // namespace

TEST(Csv, FormatNumberRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 123456789.0}) {
        EXPECT_EQ(std::stod(format_number(x)), x);
    }
}

TEST(Csv, HeaderOnlyForEmptySweep) {
    SweepResult r;
    r.axes = {Axis{"x", {}, {}}};
    EXPECT_EQ(to_csv(r), "x,value\n");
}

TEST(Csv, TwoByTwoSweep) {
    const auto table = parse_csv(to_csv(grid2x2()));
    EXPECT_EQ(table.header, (std::vector<std::string>{"a", "b", "z"}));
    ASSERT_EQ(table.rows.size(), 4u);
    EXPECT_EQ(table.rows[1][0], "1");
    EXPECT_EQ(table.rows[1][1], "hi");
    EXPECT_EQ(std::stod(table.rows[0][2]), 1.0 / 3.0);
    EXPECT_EQ(std::stod(table.rows[2][2]), 1e-300);
}

TEST(Csv, RejectsMismatchedCells) {
    auto r = grid2x2();
    r.cells.pop_back();
    EXPECT_THROW(to_csv(r), DomainError);
}

TEST(Csv, QuotingRoundTrip) {
    SweepResult r;
    r.value_name = "v";
    r.axes = {Axis{"name", {0.0, 1.0}, {"plain", "with, comma \"and quote\""}}};
    r.cells = {1.0, 2.0};
    const auto text = to_csv(r);
    EXPECT_NE(text.find("\"with, comma \"\"and quote\"\"\""), std::string::npos);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    const auto table = parse_csv(text);
    EXPECT_EQ(table.rows[1][0], "with, comma \"and quote\"");
}

TEST(Csv, OrderingVerdicts) {
    const std::vector<double> rewards = {3.0};
    const std::vector<std::size_t> delays = {1};
    const auto v = verify_ordering_equivalence(0.9, 1.0, 1.0, rewards, delays);
    const auto table = parse_csv(to_csv(v));
    EXPECT_EQ(table.header.size(), 7u);
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0][3], "true");
    EXPECT_EQ(table.rows[0][5], "true");
    EXPECT_EQ(table.rows[0][6], "false");
}

TEST(Csv, EmitWritesFile) {
    test::TempDir dir;
    emit_csv(grid2x2(), dir / "g.csv");
    EXPECT_EQ(read_text(dir / "g.csv"), to_csv(grid2x2()));
    EXPECT_THROW(emit_csv(grid2x2(), dir / "missing" / "g.csv"), IoError);
}

TEST(Svg, OnePolylinePerSeries) {
    const auto svg = render_svg_lineplot(grid2x2());
    EXPECT_EQ(count(svg, "<polyline"), 2u);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, DashedFlag) {
    PlotOptions opt;
    opt.dashed = {true};
    const auto svg = render_svg_lineplot(grid2x2(), opt);
    EXPECT_EQ(count(svg, "stroke-dasharray=\"6,4\" points"), 1u);
}

TEST(Svg, RejectsThreeAxes) {
    SweepResult r = grid2x2();
    r.axes.push_back(Axis{"c", {0.0}, {}});
    try {
        render_svg_lineplot(r);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported shape"), std::string::npos);
    }
}

TEST(Svg, SinglePointIsFinite) {
    SweepResult r;
    r.axes = {Axis{"s", {0.0}, {}}, Axis{"x", {3.0}, {}}};
    r.cells = {5.0};
    const auto svg = render_svg_lineplot(r);
    EXPECT_EQ(count(svg, "<polyline"), 1u);
    EXPECT_EQ(svg.find("nan"), std::string::npos);
    EXPECT_EQ(svg.find("inf"), std::string::npos);
}

TEST(Json, TransformRoundTrip) {
    const TransformSpec specs[] = {TransformSpec::linear(0.9),
                                   TransformSpec::hyperbolic_reward(0.8, 2.0, 1.5),
                                   TransformSpec::power_discount(0.5, 0.9),
                                   TransformSpec::linear_discount(0.7, 0.5),
                                   TransformSpec::squash_target(0.99, 1e-3), TransformSpec::hdtd(0.3)};
    for (const auto& s : specs) {
        const auto back = transform_from_json(to_json(s));
        EXPECT_EQ(back.describe(), s.describe());
        EXPECT_EQ(to_json(back), to_json(s));
    }
}

TEST(Json, TransformRejectsUnknownKey) {
    EXPECT_THROW(transform_from_json(json{{"kind", "linear"}, {"gama", 0.9}}), ValidationError);
    EXPECT_THROW(transform_from_json(json{{"kind", "cubic"}}), ValidationError);
    EXPECT_THROW(transform_from_json(json{{"kind", "reward"}, {"gamma", 1.5}}), DomainError);
}

TEST(Json, MdpRejectsDuplicateRows) {
    const json doc = {{"n_states", 1},
                      {"n_actions", 1},
                      {"terminal", json::array({false})},
                      {"transitions", json::array({json{{"s", 0}, {"a", 0}, {"out", json::array({json{{"s2", 0}, {"p", 1.0}}})}},
                                                   json{{"s", 0}, {"a", 0}, {"out", json::array({json{{"s2", 0}, {"p", 1.0}}})}}})}};
    EXPECT_THROW(mdp_from_json(doc), ValidationError);
}

TEST(Json, MissingRewardsMeansZero) {
    const json doc = {{"n_states", 1},
                      {"n_actions", 1},
                      {"terminal", json::array({false})},
                      {"transitions", json::array({json{{"s", 0}, {"a", 0}, {"out", json::array({json{{"s2", 0}, {"p", 1.0}}})}}})}};
    const Mdp mdp = mdp_from_json(doc);
    EXPECT_EQ(mdp.expected_reward(0, 0), 0.0);
}

TEST(Json, PolicyRoundTrip) {
    RandomMdpOptions opt;
    opt.n_terminal = 1;
    const Mdp mdp = random_mdp(opt, RngState(4));
    const Policy pi = test::random_policy(mdp, 4);
    EXPECT_EQ(to_json(policy_from_json(to_json(pi))), to_json(pi));
}

TEST(Json, DiagnosticsNanIsNull) {
    SolveDiagnostics d;
    d.empirical_rate = std::numeric_limits<double>::quiet_NaN();
    EXPECT_TRUE(to_json(d)["empirical_rate"].is_null());
}

TEST(Json, ValuesAndQTable) {
    EXPECT_EQ(values_from_json(json::array({1.0, 2.5})), (ValueVector{1.0, 2.5}));
    EXPECT_THROW(values_from_json(json{{"x", 1}}), ValidationError);
    ActionValueTable q(2, 2);
    q(1, 0) = 4.0;
    EXPECT_EQ(to_json(q), json::parse("[[0.0,0.0],[4.0,0.0]]"));
}

TEST(Files, ErrorsNamePath) {
    try {
        read_text("/nonexistent/nlb.json");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/nlb.json"), std::string::npos);
    }
    test::TempDir dir;
    write_text(dir / "bad.json", "{not json");
    EXPECT_THROW(read_json(dir / "bad.json"), ValidationError);
}
