#include "hibarrier/sets.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hibarrier;

namespace {

ScalarField field(const std::string& text, int n) { return ScalarField::from_expr(expr::parse_or_throw(text, n, 0), n); }
SetDescription leaf(const std::string& text, int n = 2) { return SetDescription::leaf(field(text, n)); }
Vec v2(double a, double b) { return Vec{{a, b}}; }

const SetDescription& disk() {
    static const SetDescription d = leaf("x1^2 + x2^2 - 1");
    return d;
}

SetDescription box2() { return SetDescription::intersection({leaf("x1 - 1"), leaf("-x1 - 1"), leaf("x2 - 1"), leaf("-x2 - 1")}); }

ConeQuery query(const Vec& x, const Vec& v) { return ConeQuery{x, v, 1e-6, HSequence{}}; }

}  // namespace

TEST(Membership, UnitDisk) {
    EXPECT_EQ(disk().classify(v2(0, 0), 1e-9), Membership::Inside);
    EXPECT_EQ(disk().classify(v2(1, 0), 1e-9), Membership::Boundary);
    EXPECT_EQ(disk().classify(v2(2, 0), 1e-9), Membership::Outside);
}

TEST(Membership, MonotoneInTolerance) {
    Rng rng(1);
    const Box box{v2(-2, -2), v2(2, 2)};
    for (int k = 0; k < 500; ++k) {
        const Vec x = box.uniform(rng);
        for (double tol : {1e-9, 1e-3, 0.1}) {
            if (disk().classify(x, tol) != Membership::Outside) EXPECT_NE(disk().classify(x, 2 * tol), Membership::Outside);
            if (disk().contains(x, tol)) EXPECT_TRUE(disk().contains(x, 2 * tol));
        }
    }
}

TEST(Membership, StrictLeafAndNonFinite) {
    const auto open = SetDescription::leaf(field("x1^2 + x2^2 - 1", 2), true);
    EXPECT_FALSE(open.contains(v2(1, 0), 0.0));
    EXPECT_TRUE(open.contains(v2(0.5, 0), 0.0));
    EXPECT_DOUBLE_EQ(distance(open, v2(2, 0)), 1.0);
    const auto bad = leaf("sqrt(x1)");
    EXPECT_THROW((void)bad.classify(v2(-1, 0), 1e-9), EvalError);
}

TEST(AnalyticCone, HalfPlaneAndQuadrant) {
    const auto half = leaf("x2");
    EXPECT_EQ(contingent_cone_member_analytic(half, v2(0, 0), v2(1, -1)), ConeAnswer::Member);
    EXPECT_EQ(contingent_cone_member_analytic(half, v2(0, 0), v2(0, 1)), ConeAnswer::NonMember);

    const auto quadrant = SetDescription::intersection({leaf("x1"), leaf("x2")});
    EXPECT_EQ(contingent_cone_member_analytic(quadrant, v2(0, 0), v2(-1, -1)), ConeAnswer::Member);
    // Brute-force tangency: x + 2^-k v stays in the set.
    for (int k = 1; k <= 20; ++k) EXPECT_TRUE(quadrant.contains(std::ldexp(1.0, -k) * v2(-1, -1)));

    const auto slab = SetDescription::intersection({leaf("x1"), leaf("-x1")});
    EXPECT_EQ(contingent_cone_member_analytic(slab, v2(0, 0), v2(0, 1)), ConeAnswer::NotApplicable);
    const auto either = SetDescription::unite({leaf("x1"), leaf("x2")});
    EXPECT_EQ(contingent_cone_member_analytic(either, v2(0, 0), v2(1, 1)), ConeAnswer::NotApplicable);
}

TEST(NumericCone, UnitDisk) {
    EXPECT_TRUE(contingent_cone_member_numeric(disk(), query(v2(1, 0), v2(0, 1)), 1e-6));
    EXPECT_FALSE(contingent_cone_member_numeric(disk(), query(v2(1, 0), v2(1, 0)), 1e-6));
    EXPECT_TRUE(contingent_cone_member_numeric(box2(), query(v2(1, 1), v2(0, 0)), 1e-6));
}

TEST(NumericCone, UnionCorner) {
    const auto either = SetDescription::unite({leaf("x1"), leaf("x2")});
    EXPECT_TRUE(contingent_cone_member_numeric(either, query(v2(0, 0), v2(1, -1)), 1e-6));
    EXPECT_FALSE(contingent_cone_member_numeric(either, query(v2(0, 0), v2(1, 1)), 1e-6));
}

TEST(DmCone, Examples) {
    const auto half = leaf("x2");
    EXPECT_EQ(dm_cone_member(half, v2(0, 0), v2(0, -1)), ConeAnswer::Member);
    EXPECT_EQ(dm_cone_member(half, v2(0, 0), v2(1, 0)), ConeAnswer::NonMember);
    const auto slab = SetDescription::intersection({leaf("x1"), leaf("-x1")});
    Rng rng(3);
    for (int k = 0; k < 20; ++k) EXPECT_EQ(dm_cone_member(slab, v2(0, 0), random_unit(rng, 2)), ConeAnswer::NonMember);
}

TEST(ExternalCone, UnitDisk) {
    EXPECT_TRUE(external_cone_member(disk(), query(v2(2, 0), v2(-1, 0)), 1e-6));
    EXPECT_FALSE(external_cone_member(disk(), query(v2(2, 0), v2(1, 0)), 1e-6));
    EXPECT_TRUE(external_cone_member(disk(), query(v2(2, 0), v2(0, 1)), 1e-6));
}

TEST(Distance, Examples) {
    const auto p = nearest(disk(), v2(3, 0));
    EXPECT_NEAR(p.distance, 2.0, 1e-12);
    EXPECT_TRUE(p.point.isApprox(v2(1, 0), 1e-12));
    const auto in = nearest(disk(), v2(0.2, 0.3));
    EXPECT_EQ(in.distance, 0.0);
    EXPECT_EQ(in.point, v2(0.2, 0.3));

    // Brute force over the box boundary.
    double brute = 1e9;
    for (int i = 0; i <= 4000; ++i) {
        const double s = -1.0 + 2.0 * i / 4000;
        for (const Vec& q : {v2(s, 1), v2(s, -1), v2(1, s), v2(-1, s)}) brute = std::min(brute, (q - v2(2, 2)).norm());
    }
    const auto pb = nearest(box2(), v2(2, 2));
    EXPECT_NEAR(pb.distance, brute, 1e-9);
    EXPECT_NEAR(pb.distance, std::sqrt(2.0), 1e-12);
    EXPECT_TRUE(pb.point.isApprox(v2(1, 1), 1e-12));
}

TEST(Distance, EmptySetDoesNotConverge) { EXPECT_THROW((void)distance(SetDescription::empty(2), v2(0, 0)), NonConvergence); }

TEST(Distance, NonconvexComplement) {
    const auto outside = disk().complement();
    EXPECT_NEAR(distance(outside, v2(0.5, 0)), 0.5, 1e-9);
    EXPECT_NEAR(distance(outside, v2(0, 0)), 1.0, 1e-9);
}

TEST(Minkowski, Examples) {
    EXPECT_NEAR(minkowski(disk(), v2(2, 0)), 2.0, 1e-12);
    EXPECT_EQ(minkowski(box2(), v2(0, 0)), 0.0);
    EXPECT_NEAR(minkowski(box2(), v2(0.5, 1.0)), std::max(std::abs(0.5), std::abs(1.0)), 1e-12);
    EXPECT_THROW((void)minkowski(disk().complement(), v2(1, 0)), PreconditionError);
}

TEST(Transversality, Examples) {
    std::vector<Vec> a{v2(1, 0), v2(0, 1)};
    const auto t = transversality_check(a);
    ASSERT_TRUE(t.feasible);
    EXPECT_TRUE(t.direction.isApprox(v2(-1, -1) / std::sqrt(2.0)));
    std::vector<Vec> b{v2(1, 0), v2(-1, 0)};
    EXPECT_FALSE(transversality_check(b).feasible);
    std::vector<Vec> c{v2(0, 0)};
    EXPECT_FALSE(transversality_check(c).feasible);
}

TEST(Sampling, DiskHalfPlaneAndEmpty) {
    const Box box{v2(-2, -2), v2(2, 2)};
    const auto s = sample(disk(), box, 100, 7);
    EXPECT_EQ(s.points.size(), 100u);
    for (const auto& x : s.points) EXPECT_LE(x.norm(), 1.0 + 1e-3);
    const auto none = sample(SetDescription::empty(2), box, 10, 7);
    EXPECT_TRUE(none.points.empty());
    EXPECT_TRUE(none.short_count());
    const auto bd = sample_boundary(leaf("x2"), box, 100, 1e-3, 7);
    EXPECT_EQ(bd.points.size(), 100u);
    for (const auto& x : bd.points) EXPECT_LE(std::abs(x[1]), 1e-3);
    const auto again = sample_boundary(leaf("x2"), box, 100, 1e-3, 7);
    for (std::size_t i = 0; i < bd.points.size(); ++i) EXPECT_EQ(bd.points[i], again.points[i]);
}

// ---------------------------------------------------------------- properties

namespace {

struct Polyhedron {
    SetDescription set;
    std::vector<Vec> normals;
    std::vector<bool> active;
};

// Half-spaces a_j·(y - x) ≤ s_j with s_j = 0 for active constraints.
Polyhedron random_polyhedron(Rng& rng, int n, const Vec& x) {
    std::uniform_int_distribution<int> count(2, 4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Polyhedron p{SetDescription::whole(n), {}, {}};
    std::vector<SetDescription> parts;
    const int m = count(rng);
    for (int j = 0; j < m; ++j) {
        const Vec a = random_unit(rng, n);
        const bool act = j == 0 || u(rng) < 0.5;
        const double slack = act ? 0.0 : 0.05 + u(rng);
        parts.push_back(SetDescription::leaf(ScalarField::affine(a, -a.dot(x) - slack)));
        p.normals.push_back(a);
        p.active.push_back(act);
    }
    p.set = SetDescription::intersection(parts);
    return p;
}

}  // namespace

TEST(SetsProperty, AnalyticNumericConeAgreement) {
    Rng rng(2024);
    int compared = 0;
    int agree = 0;
    const double tol = 1e-6;
    for (int k = 0; k < 1000; ++k) {
        const int n = k % 2 ? 3 : 2;
        const Vec x = random_unit(rng, n);
        const auto p = random_polyhedron(rng, n, x);
        const Vec v = random_unit(rng, n);
        const auto a = contingent_cone_member_analytic(p.set, x, v);
        if (a == ConeAnswer::NotApplicable) continue;
        bool clear = true;
        for (std::size_t j = 0; j < p.normals.size(); ++j) {
            if (p.active[j] && std::abs(p.normals[j].dot(v)) <= 10 * tol) clear = false;
        }
        if (!clear) continue;
        ++compared;
        agree += (a == ConeAnswer::Member) == contingent_cone_member_numeric(p.set, query(x, v), tol);
    }
    EXPECT_GT(compared, 500);
    EXPECT_GE(agree, static_cast<int>(0.99 * compared));
}

TEST(SetsProperty, DmConeInsideContingentCone) {
    Rng rng(99);
    for (int k = 0; k < 500; ++k) {
        const int n = 2 + k % 2;
        const Vec x = random_unit(rng, n);
        const auto p = random_polyhedron(rng, n, x);
        const Vec v = random_unit(rng, n);
        if (dm_cone_member(p.set, x, v) == ConeAnswer::Member) {
            EXPECT_EQ(contingent_cone_member_analytic(p.set, x, v), ConeAnswer::Member);
        }
    }
}

TEST(SetsProperty, DmIntersectTangentClosure) {
    Rng rng(5);
    int fired = 0;
    for (int k = 0; k < 500; ++k) {
        const int n = 2 + k % 2;
        const Vec x = random_unit(rng, n);
        const Vec a1 = random_unit(rng, n);
        const Vec a2 = random_unit(rng, n);
        const auto k1 = SetDescription::leaf(ScalarField::affine(a1, -a1.dot(x)));
        const auto k2 = SetDescription::leaf(ScalarField::affine(a2, -a2.dot(x)));
        const auto both = SetDescription::intersection({k1, k2});
        const Vec v = random_unit(rng, n);
        if (dm_cone_member(k1, x, v) == ConeAnswer::Member && contingent_cone_member(k2, x, v)) {
            ++fired;
            EXPECT_TRUE(contingent_cone_member(both, x, v));
            EXPECT_TRUE(contingent_cone_member_numeric(both, query(x, v), 1e-6));
        }
    }
    EXPECT_GT(fired, 50);
}

TEST(SetsProperty, MinkowskiHomogeneity) {
    Rng rng(17);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    std::vector<SetDescription> sets{disk()};
    for (int b = 0; b < 5; ++b) {
        const double w = u(rng);
        const double h = u(rng);
        sets.push_back(SetDescription::intersection({SetDescription::leaf(ScalarField::affine(v2(1, 0), -w)),
                                                     SetDescription::leaf(ScalarField::affine(v2(-1, 0), -w)),
                                                     SetDescription::leaf(ScalarField::affine(v2(0, 1), -h)),
                                                     SetDescription::leaf(ScalarField::affine(v2(0, -1), -h))}));
    }
    for (const auto& s : sets) {
        for (int k = 0; k < 50; ++k) {
            const Vec x = 3.0 * random_unit(rng, 2) * u(rng);
            const double base = minkowski(s, x);
            for (double alpha : {0.5, 2.0, 10.0}) EXPECT_LE(std::abs(minkowski(s, alpha * x) - alpha * base), 1e-6 * (1 + alpha));
        }
    }
}

TEST(SetsProperty, DistanceProjectionConsistency) {
    Rng rng(23);
    const Box box{v2(-3, -3), v2(3, 3)};
    const auto lens = SetDescription::intersection({disk(), leaf("(x1 - 0.5)^2 + x2^2 - 1")});
    for (const auto* s : {&disk(), &lens}) {
        for (int k = 0; k < 100; ++k) {
            const Vec x = box.uniform(rng);
            const Vec y = box.uniform(rng);
            const auto px = nearest(*s, x);
            EXPECT_NEAR((x - px.point).norm(), px.distance, 1e-12);
            EXPECT_LE(std::abs(px.distance - distance(*s, y)), (x - y).norm() + 1e-9);
            EXPECT_LE(s->value(px.point), 1e-9);
        }
    }
}
