#include "hibarrier/expr.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hibarrier::expr;

namespace {

double at(const std::string& text, std::vector<double> x, const Constants& c = {}) {
    return eval(parse_or_throw(text, static_cast<int>(x.size()), 0, c), x);
}

}  // namespace

TEST(ExprParse, BouncingBallBarrierValue) {
    // 2*1*1 + (2-1)*(2+1) = 2 + 3
    EXPECT_DOUBLE_EQ(at("2*g*x1 + (x2-1)*(x2+1)", {1.0, 2.0}, {{"g", 1.0}}), 5.0);
}

TEST(ExprParse, UnaryPlusIsRejectedAtThePlusToken) {
    auto r = parse("2*+x1", 1, 0);
    ASSERT_TRUE(std::holds_alternative<Diagnostic>(r));
    const auto& d = std::get<Diagnostic>(r);
    EXPECT_EQ(d.offset, 2u);
    EXPECT_EQ(d.line, 1);
    EXPECT_EQ(d.column, 3);
    EXPECT_FALSE(d.expected.empty());
}

TEST(ExprParse, MinCall) { EXPECT_DOUBLE_EQ(at("min(x1, 0)", {-3.0, 5.0}), -3.0); }

TEST(ExprParse, Precedence) {
    EXPECT_DOUBLE_EQ(at("-x1^2", {3.0}), -9.0);
    EXPECT_DOUBLE_EQ(at("2^3^2", {0.0}), 512.0);
    EXPECT_DOUBLE_EQ(at("8/2/2", {0.0}), 2.0);
    EXPECT_DOUBLE_EQ(at("1 - 2 - 3", {0.0}), -4.0);
    EXPECT_DOUBLE_EQ(at("x1^-1", {4.0}), 0.25);
    EXPECT_DOUBLE_EQ(at("2*-x1", {4.0}), -8.0);
}

TEST(ExprParse, Diagnostics) {
    for (const char* bad : {"", "x1 +", "(x1", "x3", "p1", "foo(x1)", "x1 ^ x2", "min(x1)", "1 $ 2", "x1 x2", ")"}) {
        auto r = parse(bad, 2, 0);
        ASSERT_TRUE(std::holds_alternative<Diagnostic>(r)) << bad;
        EXPECT_LE(std::get<Diagnostic>(r).offset, std::string(bad).size()) << bad;
    }
    auto r = parse("x1 +\n  * x2", 2, 0);
    ASSERT_TRUE(std::holds_alternative<Diagnostic>(r));
    EXPECT_EQ(std::get<Diagnostic>(r).line, 2);
    EXPECT_EQ(std::get<Diagnostic>(r).column, 3);
}

TEST(ExprEval, Basics) {
    EXPECT_DOUBLE_EQ(at("7", {1.0, 2.0}), 7.0);
    EXPECT_DOUBLE_EQ(at("x1^2", {3.0}), 9.0);
    EXPECT_DOUBLE_EQ(at("sqrt(abs(x2))", {0.0, -4.0}), 2.0);
    EXPECT_DOUBLE_EQ(at("sgn(x1)", {0.0}), 0.0);
    EXPECT_DOUBLE_EQ(at("sgn(x1)", {-2.0}), -1.0);
    EXPECT_DOUBLE_EQ(at("log(exp(x1))", {1.5}), 1.5);
    EXPECT_TRUE(std::isnan(at("sqrt(x1)", {-1.0})));
}

TEST(ExprEval, Parameters) {
    const Ast a = parse_or_throw("x1 - (2 + 2*p1)", 1, 1);
    const std::vector<double> x{1.0};
    EXPECT_DOUBLE_EQ(eval(a, x, std::vector<double>{0.0}), -1.0);
    EXPECT_DOUBLE_EQ(eval(a, x, std::vector<double>{1.0}), -3.0);
}

TEST(ExprDiff, Examples) {
    const Ast sq = parse_or_throw("x1^2", 1, 0);
    auto d = diff(sq, 1);
    ASSERT_TRUE(std::holds_alternative<Ast>(d));
    EXPECT_EQ(to_string(std::get<Ast>(d)), "2*x1");
    EXPECT_DOUBLE_EQ(eval(std::get<Ast>(d), std::vector<double>{3.0}), 6.0);

    auto d2 = diff(parse_or_throw("x1*x2", 2, 0), 2);
    ASSERT_TRUE(std::holds_alternative<Ast>(d2));
    EXPECT_EQ(to_string(std::get<Ast>(d2)), "x1");

    EXPECT_TRUE(std::holds_alternative<NonSmoothMarker>(diff(parse_or_throw("abs(x1)", 1, 0), 1)));
    // Non-smooth parts off the derivative path do not matter.
    EXPECT_TRUE(std::holds_alternative<Ast>(diff(parse_or_throw("abs(x2) + x1", 2, 0), 1)));
}

namespace {

const std::vector<std::string>& corpus() {
    static const std::vector<std::string> c = {
        "x1", "x2", "1", "2.5", "1e-3", "x1 + x2", "x1 - x2", "x1*x2", "x1/x2", "x1^2",
        "-x1", "--x1", "-x1^2", "(-x1)^2", "x1^-2", "x1^(1/2)", "2^3^2", "(x1 + 1)*(x2 - 1)", "x1 - (x2 - x3)", "x1/(x2*x3)",
        "x1*x2*x3", "(x1*x2)/x3", "x1 - x2 + x3", "x1 + x2*x3 - 4", "abs(x1)", "sqrt(abs(x2))", "exp(x1)*log(1 + x2^2)", "min(x1, x2)", "max(x1, min(x2, x3))", "sgn(x1)*x2",
        "2*g*x1 + (x2 - 1)*(x2 + 1)", "x1^2 + x2^2 - 1", "-(x2^2)", "x2*x1 - x2*(2 + 2*p1 - (x1^2 + x2^2))", "x2 + max(x1, 0)^3", "-(x1^2 + (x2 + 1)^2 - 4)", "x1/sqrt(3)", "0.5*x2 - x1/2", "-(1 + p1)*x1 + x2/2", "p1*abs(x1)",
        "exp(-x1^2)", "log(x1^2 + 1)/2", "x1*-x2", "x1 - -x2", "(x1 - x2)^3", "1/(1 + x1^2)", "max(abs(x1), abs(x2)) - 1", "sqrt(x1^2 + x2^2 + x3^2)", "x3 - x2*x1^2", "((x1))",
    };
    return c;
}

double fd(const Ast& a, std::vector<double> x, int i) {
    const double h = 1e-6 * (1.0 + std::abs(x[static_cast<std::size_t>(i)]));
    const std::vector<double> p{0.3};
    auto xp = x;
    auto xm = x;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    return (eval(a, xp, p) - eval(a, xm, p)) / (2 * h);
}

}  // namespace

TEST(ExprProperty, PrettyPrintRoundTrip) {
    ASSERT_EQ(corpus().size(), 50u);
    for (const auto& t : corpus()) {
        const Ast a = parse_or_throw(t, 3, 1, {{"g", 1.0}});
        const std::string printed = to_string(a);
        const Ast b = parse_or_throw(printed, 3, 1, {{"g", 1.0}});
        EXPECT_TRUE(structurally_equal(a, b)) << t << " -> " << printed;
    }
}

TEST(ExprProperty, DiffMatchesFiniteDifferences) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    int smooth = 0;
    for (const auto& t : corpus()) {
        const Ast a = parse_or_throw(t, 3, 1, {{"g", 1.0}});
        for (int var = 1; var <= 3; ++var) {
            auto d = diff(a, var);
            if (!std::holds_alternative<Ast>(d)) continue;
            ++smooth;
            for (int k = 0; k < 100; ++k) {
                std::vector<double> x{u(rng), u(rng), u(rng)};
                const double sym = eval(std::get<Ast>(d), x, std::vector<double>{0.3});
                const double num = fd(a, x, var - 1);
                EXPECT_NEAR(sym, num, 1e-6 * (1.0 + std::abs(sym))) << t << " d/dx" << var;
            }
        }
    }
    EXPECT_GT(smooth, 100);
}

TEST(ExprProperty, ParseIsTotal) {
    std::mt19937_64 rng(5);
    const std::string alphabet = "x1p2+-*/^() ,.eminaxbsqrtlog9$\n";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 24);
    for (int i = 0; i < 5000; ++i) {
        std::string s;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) s += alphabet[pick(rng)];
        auto r = parse(s, 2, 2);
        if (auto* d = std::get_if<Diagnostic>(&r)) EXPECT_LE(d->offset, s.size() + 1);
    }
}
