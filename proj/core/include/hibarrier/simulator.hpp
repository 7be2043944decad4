#pragma once

#include "hibarrier/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hibarrier {

// How λ ∈ [0,1]^k is picked for a flow step or a jump.
struct ParameterRule {
    enum class Kind { Constant, PerStepRandom, AdversarialGrid };
    Kind kind = Kind::Constant;
    Vec lambda;    // Constant; empty means all zeros, one entry applies to every parameter
    int grid = 3;  // AdversarialGrid, d ≥ 2

    static ParameterRule constant(Vec lambda) { return {Kind::Constant, std::move(lambda), 3}; }
    static ParameterRule random() { return {Kind::PerStepRandom, Vec(), 3}; }
    static ParameterRule adversarial(int d) { return {Kind::AdversarialGrid, Vec(), d}; }
    std::string to_string() const;
};

struct OverlapRule {
    enum class Kind { PreferFlow, PreferJump, Bernoulli };
    Kind kind = Kind::PreferFlow;
    double p = 0.5;  // probability of jumping

    std::string to_string() const;
};

struct SelectionPolicy {
    ParameterRule flow;
    ParameterRule jump;
    OverlapRule overlap;
    std::uint64_t seed = 0;
    // Objective for AdversarialGrid; the policy maximizes its one-step increase.
    std::optional<ScalarField> objective;

    std::string to_string() const;
};

struct Horizon {
    double T = 10.0;
    int J = 10;
    double step = 1e-3;
    double guard_tol = 1e-12;   // bisection stops once the bracket is this narrow
    double member_tol = 1e-9;   // membership slack for C and D
    int zeno_jumps = 50;        // consecutive jumps without flow time

    void validate() const;
};

// Throws PreconditionError when x0 is outside cl(C) ∪ D.
HybridArc solve(const HybridSystem& h, const Vec& x0, const SelectionPolicy& policy, const Horizon& horizon);

struct FalsifyBudget {
    int starts = 50;
    Horizon horizon{5.0, 10, 1e-2};
    // Empty means the default pool: constant corners, per-step random, adversarial grid.
    std::vector<SelectionPolicy> policies;
    std::uint64_t seed = 1;
    Box box;
    double band = 1e-3;
    double exit_tol = 1e-9;
    int workers = 1;
};

struct FalsifyStats {
    int starts = 0;
    int runs = 0;
    int horizon_reached = 0;
    int solution_dies = 0;
    int left_cud = 0;
    int numerical_failure = 0;
    int zeno = 0;
};

struct Counterexample {
    int start_index = 0;
    std::string policy;
    HybridArc arc;
    Scenario exit;
    Vec barrier_at_exit;
};

struct FalsifyResult {
    std::optional<Counterexample> counterexample;
    FalsifyStats stats;

    bool found() const { return counterexample.has_value(); }
};

std::vector<SelectionPolicy> default_policy_pool(const HybridSystem& h, const KComplex& k, std::uint64_t seed);

FalsifyResult falsify_invariance(const HybridSystem& h, const KComplex& k, const FalsifyBudget& budget);

struct ProbeOptions {
    double tau = 0.5;
    double entry_margin = 1e-6;
    double tol = 1e-9;
};

struct ProbeRun {
    Vec start;
    std::string policy;
    HybridArc arc;
    bool entered = false;
    bool left_k = false;
    double worst_barrier = 0.0;  // largest max_i B_i after the start
};

// Runs from a point of ∂K; throws PreconditionError otherwise.
ProbeRun probe_from(const HybridSystem& h, const KComplex& k, const Vec& x0, const SelectionPolicy& policy,
                    const Horizon& horizon, const ProbeOptions& opt, double band);

struct ProbeResult {
    enum class Kind { BoundaryLingering, ImmediateEntry };
    Kind kind = Kind::ImmediateEntry;
    std::optional<ProbeRun> witness;  // BoundaryLingering
    int starts = 0;
    int runs = 0;
    int entered = 0;
    int stalled = 0;  // runs without any step past the start
};
std::string to_string(ProbeResult::Kind k);

ProbeResult probe_contractivity(const HybridSystem& h, const KComplex& k, const FalsifyBudget& budget,
                                const ProbeOptions& opt);

// Header t,j,x1..xn,B1..Bm,flag; a jump gives two rows with equal t and consecutive j.
void write_arc_csv(std::ostream& os, const HybridArc& arc, const BarrierCandidate& b);

}  // namespace hibarrier
