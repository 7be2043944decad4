#include "support.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace hibarrier;
using hibarrier::testing::v2;

namespace {

const std::string kValid = R"({"dim": 2,
  "C": {"all": []}, "D": {"any": []},
  "F": ["x1", "x2"], "G": ["x1", "x2"],
  "barrier": ["x1"], "box": {"lo": [-1, -1], "hi": [1, 1]}})";

config::ConfigError error_of(std::string_view text) {
    try {
        (void)config::parse_config(text, "sys.json");
    } catch (const config::ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no error for " << text;
    return {"", "", "", 0, 0};
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
    text.replace(text.find(from), from.size(), to);
    return text;
}

}  // namespace

TEST(ConfigErrors, ExpressionPositionPointsAtToken) {
    const auto e = error_of(replaced(kValid, R"("x2"], "G")", R"("x2 +* 1"], "G")"));
    EXPECT_EQ(e.pointer(), "/F/1");
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 20);
    EXPECT_EQ(e.origin(), "sys.json");
    EXPECT_NE(std::string(e.what()).find("sys.json:3:20: /F/1:"), std::string::npos);
}

TEST(ConfigErrors, JsonSyntax) {
    const auto e = error_of(R"({"dim": 2,)");
    EXPECT_EQ(e.line(), 1);
    EXPECT_GT(e.column(), 1);
}

TEST(ConfigErrors, Structure) {
    EXPECT_NE(error_of(R"({"C": {"all": []}})").message().find("dim"), std::string::npos);
    EXPECT_EQ(error_of(replaced(kValid, R"(["x1", "x2"], "G")", R"(["x1"], "G")")).pointer(), "/F");
    EXPECT_EQ(error_of(replaced(kValid, R"("x2"], "G")", R"("x3"], "G")")).pointer(), "/F/1");
    EXPECT_EQ(error_of(replaced(kValid, R"({"all": []})", R"({"nope": []})")).pointer(), "/C");
    EXPECT_EQ(error_of(replaced(kValid, R"("lo": [-1, -1])", R"("lo": [1, -1])")).pointer(), "/box");
    EXPECT_EQ(error_of(replaced(kValid, R"("barrier": ["x1"])", R"("barrier": [])")).pointer(), "/barrier");
}

TEST(Config, SetTreeForms) {
    const auto text = replaced(replaced(kValid, R"("C": {"all": []})", R"("C": {"any": ["x1", {"leaf": "-x2", "strict": true}]})"),
                               R"("D": {"any": []})", R"("D": {"all": ["x1 - 0.5"]})");
    const auto m = config::build_model(config::parse_config(text));
    EXPECT_TRUE(m.system.C.contains(v2(-1, -1), 0.0));
    EXPECT_TRUE(m.system.C.contains(v2(1, 1), 0.0));
    EXPECT_FALSE(m.system.C.contains(v2(1, 0), 0.0));
    EXPECT_TRUE(m.system.D.contains(v2(0.5, 3), 0.0));
    EXPECT_FALSE(m.system.D.contains(v2(0.6, 3), 0.0));
}

TEST(Config, ConstantsParamsAndSmoothness) {
    const auto text = R"({"dim": 1, "params": 1, "constants": {"k": 3},
      "C": {"all": []}, "D": {"any": []}, "F": ["-k*p1*x1"], "G": ["x1"],
      "barrier": ["abs(x1) - 1", {"expr": "x1^2 - k", "smoothness": "lipschitz"}],
      "box": {"lo": [-2], "hi": [2]}})";
    const auto cfg = config::parse_config(text);
    EXPECT_EQ(cfg.params, 1);
    const auto m = config::build_model(cfg);
    EXPECT_DOUBLE_EQ(m.system.F(Vec{{1.0}}, Vec{{0.5}})[0], -1.5);
    ASSERT_EQ(m.barrier.size(), 2);
    EXPECT_EQ(m.barrier.components[0].smoothness(), Smoothness::LocallyLipschitz);
    EXPECT_EQ(m.barrier.components[1].smoothness(), Smoothness::LocallyLipschitz);
    EXPECT_DOUBLE_EQ(m.barrier(Vec{{1.0}})[1], -2.0);
}

TEST(Config, CatalogFixturesLoadAndRoundTrip) {
    ASSERT_EQ(catalog::ids().size(), 9u);
    for (const auto& id : catalog::ids()) {
        const auto cfg = catalog::load(id);
        EXPECT_EQ(cfg.name, id);
        ASSERT_TRUE(cfg.expected.has_value()) << id;
        EXPECT_FALSE(cfg.expected->checks.empty() && cfg.expected->falsify.empty()) << id;
        const auto again = config::parse_config(config::dump(cfg), id);
        EXPECT_EQ(again.source, cfg.source) << id;
        const auto m = config::build_model(again);
        EXPECT_EQ(m.system.n, cfg.dim);
    }
    EXPECT_THROW((void)catalog::load("nope"), std::out_of_range);
    EXPECT_EQ(catalog::find("nope"), nullptr);
}

TEST(Config, ExpectedBlock) {
    const auto cfg = catalog::load("expcount");
    const auto& e = *cfg.expected;
    ASSERT_EQ(e.checks.size(), 3u);
    EXPECT_EQ(e.checks[2].theorem, "boundary");
    EXPECT_EQ(e.checks[2].option.value_or(""), "c");
    EXPECT_EQ(e.checks[2].status, "Inconclusive");
    ASSERT_EQ(e.falsify.size(), 1u);
    EXPECT_TRUE(e.falsify[0].counterexample);
    EXPECT_EQ(e.falsify[0].J, 0);
}
