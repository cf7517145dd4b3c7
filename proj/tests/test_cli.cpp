#include "nlb/cli.hpp"
#include "nlb/generators.hpp"
#include "nlb/io.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace nlb;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "nlb");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string write_self_loop(const test::TempDir& dir) {
    const double r[] = {1.0};
    const auto path = (dir / "loop.json").string();
    write_json(path, to_json(self_loop_mdp(r)));
    return path;
}

std::string write_random(const test::TempDir& dir) {
    RandomMdpOptions opt;
    opt.n_terminal = 1;
    opt.terminal_prob_min = 0.2;
    opt.terminal_prob_max = 0.4;
    const auto path = (dir / "random.json").string();
    write_json(path, to_json(random_mdp(opt, RngState(21))));
    return path;
}

class ScopedEnv {
public:
    ScopedEnv(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
    ~ScopedEnv() { ::unsetenv(name_); }

private:
    const char* name_;
};

} // namespace

TEST(Cli, ValidateReportsRowSum) {
    test::TempDir dir;
    write_text(dir / "bad.json",
               R"({"n_states":2,"n_actions":1,"terminal":[false,true],)"
               R"("transitions":[{"s":0,"a":0,"out":[{"s2":1,"p":1.1}]}]})");
    const auto r = run({"validate", "--mdp", (dir / "bad.json").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("invalid: ", 0), 0u);
    EXPECT_NE(r.err.find("(0,0)"), std::string::npos) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, ValidateAcceptsGoodFile) {
    test::TempDir dir;
    const auto r = run({"validate", "--mdp", write_self_loop(dir)});
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, SolveSelfLoop) {
    test::TempDir dir;
    const auto r = run({"solve", "--mdp", write_self_loop(dir), "--gamma", "0.5", "--out",
                        dir.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto v = values_from_json(read_json(dir / "values.json"));
    EXPECT_NEAR(v[0], 2.0, 1e-9);
    const auto diag = read_json(dir / "diagnostics.json");
    EXPECT_TRUE(diag["converged"].get<bool>());
}

TEST(Cli, SolveThenQValues) {
    test::TempDir dir;
    const auto mdp = write_random(dir);
    ASSERT_EQ(run({"solve", "--mdp", mdp, "--transform", "power", "--gamma", "0.5", "--kappa", "0.9",
                   "--out", dir.path().string()})
                  .code,
              0);
    const auto with_values = run({"qvalues", "--mdp", mdp, "--transform", "power", "--gamma", "0.5",
                                  "--kappa", "0.9", "--values", (dir / "values.json").string(),
                                  "--out", dir.path().string()});
    ASSERT_EQ(with_values.code, 0) << with_values.err;
    const auto q1 = read_json(dir / "qvalues.json");
    test::TempDir other;
    ASSERT_EQ(run({"qvalues", "--mdp", mdp, "--transform", "power", "--gamma", "0.5", "--kappa",
                   "0.9", "--out", other.path().string()})
                  .code,
              0);
    EXPECT_EQ(read_json(other / "qvalues.json"), q1);
    const Policy greedy = policy_from_json(read_json(dir / "greedy_policy.json"));
    EXPECT_EQ(greedy.at(0).size(), 1u);
}

TEST(Cli, VerifyOrderingAllAgree) {
    test::TempDir dir;
    const auto r = run({"verify-ordering", "--gamma", "0.9", "--k", "1", "--out", dir.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto table = parse_csv(read_text(dir / "ordering.csv"));
    EXPECT_EQ(table.rows.size(), 19u * 51u);
    for (const auto& row : table.rows)
        if (row[6] == "false") EXPECT_EQ(row[5], "true");
}

TEST(Cli, RerunsAreByteIdentical) {
    test::TempDir a, b;
    const auto mdp = write_random(a);
    for (const auto* dir : {&a, &b}) {
        ASSERT_EQ(run({"td", "--mdp", mdp, "--episodes", "300", "--seed", "3", "--out",
                       dir->path().string()})
                      .code,
                  0);
        ASSERT_EQ(run({"sweep-gaps", "--out", dir->path().string()}).code, 0);
        ASSERT_EQ(run({"contraction", "--mdp", mdp, "--pairs", "50", "--out", dir->path().string()}).code,
                  0);
    }
    for (const char* f : {"values.json", "diagnostics.json", "gaps.csv", "gaps.svg", "contraction.json"})
        EXPECT_EQ(read_text(a / f), read_text(b / f)) << f;
}

TEST(Cli, BadArgumentsExitThree) {
    EXPECT_EQ(run({}).code, 3);
    EXPECT_EQ(run({"solve", "--gamma", "abc"}).code, 3);
    EXPECT_EQ(run({"solve", "--no-such-flag"}).code, 3);
    EXPECT_EQ(run({"solve"}).code, 3);
    EXPECT_EQ(run({"td", "--mdp", "x.json", "--alpha", "fast"}).code, 3);
}

TEST(Cli, DomainErrorsExitOne) {
    test::TempDir dir;
    EXPECT_EQ(run({"solve", "--mdp", (dir / "missing.json").string()}).code, 1);
    EXPECT_EQ(run({"solve", "--mdp", write_self_loop(dir), "--gamma", "1.5", "--transform", "reward",
                   "--out", dir.path().string()})
                  .code,
              1);
}

TEST(Cli, NonConvergenceExitsTwo) {
    test::TempDir dir;
    EXPECT_EQ(run({"solve", "--mdp", write_self_loop(dir), "--gamma", "0.99", "--max-iters", "5",
                   "--out", dir.path().string()})
                  .code,
              2);
}

TEST(Cli, ConfigPrecedence) {
    test::TempDir dir;
    const auto mdp = write_self_loop(dir);
    write_text(dir / "cfg.json", R"({"gamma": 0.5, "out": ")" + dir.path().string() + "\"}");
    ASSERT_EQ(run({"solve", "--mdp", mdp, "--config", (dir / "cfg.json").string()}).code, 0);
    EXPECT_NEAR(values_from_json(read_json(dir / "values.json"))[0], 2.0, 1e-9);
    ASSERT_EQ(run({"solve", "--mdp", mdp, "--config", (dir / "cfg.json").string(), "--gamma", "0.75"})
                  .code,
              0);
    EXPECT_NEAR(values_from_json(read_json(dir / "values.json"))[0], 4.0, 1e-9);

    write_text(dir / "nested.json",
               R"({"transform": {"kind": "linear-discount", "gamma": 0.5, "kappa": 0.5}, "out": ")" +
                   dir.path().string() + "\"}");
    ASSERT_EQ(run({"solve", "--mdp", mdp, "--config", (dir / "nested.json").string()}).code, 0);
    EXPECT_NEAR(values_from_json(read_json(dir / "values.json"))[0], 4.0 / 3.0, 1e-9);

    write_text(dir / "typo.json", R"({"gama": 0.5})");
    EXPECT_EQ(run({"solve", "--mdp", mdp, "--config", (dir / "typo.json").string()}).code, 3);
}

TEST(Cli, SeedFromEnvironment) {
    test::TempDir a, b, c;
    const auto mdp = write_random(a);
    ASSERT_EQ(run({"td", "--mdp", mdp, "--episodes", "200", "--seed", "11", "--out", a.path().string()})
                  .code,
              0);
    {
        ScopedEnv env("NLB_SEED", "11");
        ASSERT_EQ(run({"td", "--mdp", mdp, "--episodes", "200", "--out", b.path().string()}).code, 0);
        ASSERT_EQ(run({"td", "--mdp", mdp, "--episodes", "200", "--seed", "12", "--out",
                       c.path().string()})
                      .code,
                  0);
    }
    EXPECT_EQ(read_text(a / "values.json"), read_text(b / "values.json"));
    EXPECT_NE(read_text(a / "values.json"), read_text(c / "values.json"));
    ScopedEnv bad("NLB_SEED", "eleven");
    EXPECT_EQ(run({"td", "--mdp", mdp, "--out", a.path().string()}).code, 3);
}

TEST(Cli, CurvesSvgHasTwoPolylinesPerGamma) {
    test::TempDir dir;
    ASSERT_EQ(run({"sweep-curves", "--gammas", "0.5", "0.9", "0.99", "--out", dir.path().string()}).code,
              0);
    const auto svg = read_text(dir / "curves.svg");
    std::size_t n = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1))
        ++n;
    EXPECT_EQ(n, 6u);
}
