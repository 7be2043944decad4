#include "hibarrier/field.hpp"
#include "hibarrier/set_valued_map.hpp"
#include "hibarrier/sets.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hibarrier;

namespace {

ScalarField field(const std::string& text, int n, std::optional<Smoothness> tag = std::nullopt) {
    return ScalarField::from_expr(expr::parse_or_throw(text, n, 0), n, tag);
}

Vec v2(double a, double b) { return Vec{{a, b}}; }

}  // namespace

TEST(Gradient, Examples) {
    const auto bb = field("2*1*x1 + (x2-1)*(x2+1)", 2);
    ASSERT_TRUE(bb.has_analytic_gradient());
    EXPECT_TRUE(gradient(bb, v2(0, 1)).isApprox(v2(2, 2)));
    EXPECT_TRUE(gradient(field("x2", 2), v2(-3, 7)).isApprox(v2(0, 1)));
    EXPECT_EQ(gradient(field("x1^2 + x2^2", 2), v2(0, 0)).norm(), 0.0);
}

TEST(Gradient, NonFiniteCarriesPoint) {
    const auto f = field("sqrt(x1)", 1);
    try {
        (void)f.value(Vec{{-1.0}});
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_EQ(e.point[0], -1.0);
    }
}

TEST(Clarke, AbsoluteValueAtKink) {
    const auto f = field("abs(x1)", 2);
    EXPECT_EQ(f.smoothness(), Smoothness::LocallyLipschitz);
    EXPECT_NEAR(clarke_support(f, v2(0, 0), v2(1, 0), 1e-4, 64, 3), 1.0, 1e-6);
}

TEST(Clarke, MaxOfCoordinates) {
    const auto f = field("max(x1, x2)", 2);
    EXPECT_NEAR(clarke_support(f, v2(0, 0), v2(1, 1), 1e-4, 64, 3), 1.0, 1e-6);
    // v = (1, -1): hull of e1, e2 gives support 1 (attained at e1).
    EXPECT_NEAR(clarke_support(f, v2(0, 0), v2(1, -1), 1e-4, 64, 3), 1.0, 1e-6);
}

TEST(Clarke, SmoothFieldMatchesGradient) {
    const auto f = field("x1^2*x2 - 3*x2", 2);
    const Vec x = v2(0.7, -0.4);
    const Vec v = v2(0.3, 0.8);
    const double rho = 1e-4;
    EXPECT_NEAR(clarke_support(f, x, v, rho, 64, 9), gradient(f, x).dot(v), 10 * rho);
}

TEST(Clarke, DeterministicForSeed) {
    const auto f = field("abs(x1) + max(x2, 0)", 2);
    EXPECT_EQ(clarke_support(f, v2(0, 0), v2(1, 1), 1e-4, 64, 42), clarke_support(f, v2(0, 0), v2(1, 1), 1e-4, 64, 42));
}

TEST(ImageSamples, Exp1FlowVertices) {
    const auto F = SetValuedMap::from_exprs(
        {expr::parse_or_throw("-x2^2", 2, 1), expr::parse_or_throw("x2*x1 - x2*(2 + 2*p1 - (x1^2 + x2^2))", 2, 1)}, 2, 1);
    const auto imgs = image_samples(F, v2(0, 1), ImageScheme::vertices());
    ASSERT_EQ(imgs.size(), 2u);
    // -1, then 0 - (2 - 1) and 0 - (4 - 1).
    EXPECT_TRUE(imgs[0].isApprox(v2(-1, -1)));
    EXPECT_TRUE(imgs[1].isApprox(v2(-1, -3)));
}

TEST(ImageSamples, SingleValuedAndBouncingBallJump) {
    const auto G = SetValuedMap::from_exprs({expr::parse_or_throw("0", 2, 0), expr::parse_or_throw("-0.5*x2", 2, 0)}, 2, 0);
    const auto imgs = image_samples(G, v2(0, -1), ImageScheme::vertices());
    ASSERT_EQ(imgs.size(), 1u);
    EXPECT_TRUE(imgs[0].isApprox(v2(0, 0.5)));
}

TEST(ImageSamples, SchemesAndBudget) {
    const SetValuedMap wide(1, 13, [](const Vec& x, const Vec& l) { return Vec{{x[0] + l.sum()}}; });
    EXPECT_THROW((void)image_samples(wide, Vec{{0.0}}, ImageScheme::vertices()), std::length_error);
    EXPECT_EQ(image_samples(wide, Vec{{0.0}}, ImageScheme::random(7, 1)).size(), 7u);
    const SetValuedMap two(1, 2, [](const Vec& x, const Vec& l) { return Vec{{x[0] + l[0] - l[1]}}; });
    EXPECT_EQ(image_samples(two, Vec{{0.0}}, ImageScheme::lattice(3)).size(), 9u);
    const auto a = image_samples(two, Vec{{0.0}}, ImageScheme::random(5, 77));
    const auto b = image_samples(two, Vec{{0.0}}, ImageScheme::random(5, 77));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(FilterByCone, InteriorKeepsEverything) {
    const auto disk = SetDescription::leaf(field("x1^2 + x2^2 - 1", 2));
    const std::vector<Vec> etas{v2(1, 0), v2(-1, 3)};
    EXPECT_EQ(filter_by_cone(etas, disk, v2(0, 0)).size(), 2u);
    EXPECT_TRUE(filter_by_cone({}, disk, v2(1, 0)).empty());
}

TEST(FilterByCone, ThermostatLowerThreshold) {
    // {q = 0, z ≥ zmin} with zmin = 0.5
    const auto C0 = SetDescription::intersection({SetDescription::leaf(field("x1", 2)), SetDescription::leaf(field("-x1", 2)),
                                                  SetDescription::leaf(field("0.5 - x2", 2))});
    const std::vector<Vec> etas{v2(0, 0.7), v2(0, -0.2)};
    const auto kept = filter_by_cone(etas, C0, v2(0, 0.5));
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_GT(kept[0][1], 0.0);
}

TEST(FieldProperty, FiniteDifferencesMatchAnalyticGradients) {
    Rng rng(4);
    const Box box{v2(-2, -2), v2(2, 2)};
    for (const char* text : {"x1^2 + x2^2 - 1", "2*x1 + (x2 - 1)*(x2 + 1)", "x1*x2^3 - exp(x1/3)", "x2*(x1^2 + x2^2 - 1)", "log(1 + x1^2)*x2"}) {
        const auto f = field(text, 2);
        for (int k = 0; k < 100; ++k) {
            const Vec x = box.uniform(rng);
            const Vec g = *f.analytic_gradient(x);
            EXPECT_LE((g - fd_gradient(f, x)).norm(), 1e-5 * (1 + g.norm())) << text;
        }
    }
}

TEST(FieldProperty, ScalarizationSupportFollowsActiveComponent) {
    const auto b1 = field("x1^2 + x2^2 - 1", 2);
    const auto b2 = field("-x2", 2);
    const auto bbar = ScalarField::max_of({b1, b2});
    Rng rng(8);
    const Box box{v2(-2, -2), v2(2, 2)};
    const double rho = 1e-4;
    int tested = 0;
    for (int k = 0; k < 300; ++k) {
        const Vec x = box.uniform(rng);
        const double a = b1(x);
        const double b = b2(x);
        if (std::abs(a - b) <= 10 * rho) continue;
        const Vec v = random_unit(rng, 2);
        const auto& active = a > b ? b1 : b2;
        EXPECT_NEAR(clarke_support(bbar, x, v, rho, 64, static_cast<std::uint64_t>(k)), gradient(active, x).dot(v), 10 * rho);
        ++tested;
    }
    EXPECT_GT(tested, 200);
}
