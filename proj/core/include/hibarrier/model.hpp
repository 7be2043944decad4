#pragma once

#include "hibarrier/common.hpp"
#include "hibarrier/expr.hpp"
#include "hibarrier/field.hpp"
#include "hibarrier/set_valued_map.hpp"
#include "hibarrier/sets.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hibarrier {

// H = (C, F, D, G).
struct HybridSystem {
    std::string name;
    int n = 0;
    SetDescription C;
    SetValuedMap F;
    SetDescription D;
    SetValuedMap G;
    expr::Constants constants;
    // Standing assumptions, asserted rather than proven.
    bool assume_convex_images = true;
    bool assume_g_nonempty_on_d = true;

    SetDescription flow_or_jump() const { return SetDescription::unite({C, D}); }
    // Throws std::invalid_argument on arity mismatches.
    void validate() const;
};

struct BarrierCandidate {
    std::vector<ScalarField> components;

    int size() const { return static_cast<int>(components.size()); }
    Vec operator()(const Vec& x) const;
    // max_i B_i
    double scalarized(const Vec& x) const;
    ScalarField scalar() const;
    bool all_c1() const;
};

struct ArcInterval {
    std::vector<double> t;
    std::vector<Vec> x;

    bool degenerate() const { return t.size() == 1; }
};

struct HybridTimeDomain {
    std::vector<double> t;            // t_0 = 0 ≤ t_1 ≤ ... ≤ t_{J+1}
    std::vector<bool> degenerate;     // per interval [t_j, t_{j+1}]

    bool valid() const;
};

enum class TerminationCause { HorizonReached, SolutionDies, LeftCUnionD, NumericalFailure };
std::string to_string(TerminationCause c);

struct HybridArc {
    std::vector<ArcInterval> intervals;  // index j
    TerminationCause cause = TerminationCause::HorizonReached;
    bool zeno = false;
    bool dies_sampled = false;

    int jumps() const { return intervals.empty() ? 0 : static_cast<int>(intervals.size()) - 1; }
    bool empty() const { return intervals.empty(); }
    const Vec& initial() const { return intervals.front().x.front(); }
    const Vec& final_state() const { return intervals.back().x.back(); }
    double final_time() const { return intervals.back().t.back(); }
    HybridTimeDomain domain() const;
};

// K = {x ∈ C∪D : B(x) ≤ 0} with its derived sets.
struct KComplex {
    SetDescription flow_or_jump;
    SetDescription K;
    SetDescription Ke;
    std::vector<SetDescription> Kei;
    // M_i as a set: K ∩ {B_i ≥ 0}.
    std::vector<SetDescription> Mi;
    BarrierCandidate B;
    ScalarField Bbar;

    bool in_K(const Vec& x, double tol) const;
    // Samples of M_i, each Boundary for K at tolerance band.
    std::vector<Vec> sample_M(int i, const Box& box, int count, double band, std::uint64_t seed) const;
};

KComplex build_k_complex(const HybridSystem& h, const BarrierCandidate& b);

struct ArcViolation {
    enum class Kind { S0, S1State, S1Velocity, S2PreJump, S2PostJump, Malformed };
    Kind kind;
    int j = 0;
    double t = 0.0;
    Vec x;
    std::string detail;
};
std::string to_string(ArcViolation::Kind k);

struct ArcCheckOptions {
    double tol = 1e-6;
    ImageScheme scheme = ImageScheme::vertices();
};

std::vector<ArcViolation> validate_arc(const HybridArc& arc, const HybridSystem& h, const ArcCheckOptions& opt = {});

struct Scenario {
    enum class Kind { StaysInK, LeavesByJump, LeavesByFlow };
    Kind kind = Kind::StaysInK;
    double t = 0.0;
    int j = 0;
    Vec x;
};
std::string to_string(Scenario::Kind k);

Scenario scenario_classify(const HybridArc& arc, const KComplex& k, double tol = 1e-9);

// Distance from v to the convex hull of points (small active-set QP via Frank-Wolfe).
double distance_to_hull(const Vec& v, std::span<const Vec> points);

}  // namespace hibarrier
