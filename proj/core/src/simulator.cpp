#include "hibarrier/simulator.hpp"

#include "regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace hibarrier {

std::string ParameterRule::to_string() const {
    switch (kind) {
    case Kind::Constant: return "constant" + (lambda.size() ? format_vec(lambda) : std::string("(0)"));
    case Kind::PerStepRandom: return "random";
    case Kind::AdversarialGrid: return "adversarial:" + std::to_string(grid);
    }
    return "?";
}

std::string OverlapRule::to_string() const {
    switch (kind) {
    case Kind::PreferFlow: return "flow";
    case Kind::PreferJump: return "jump";
    case Kind::Bernoulli: {
        std::ostringstream os;
        os << "bernoulli:" << p;
        return os.str();
    }
    }
    return "?";
}

std::string SelectionPolicy::to_string() const {
    return "flow=" + flow.to_string() + " jump=" + jump.to_string() + " overlap=" + overlap.to_string();
}

void Horizon::validate() const {
    if (!(T >= 0) || J < 0) throw std::invalid_argument("horizon: T and J must be non-negative");
    if (!(step > 0)) throw std::invalid_argument("horizon: step must be positive");
    if (!(guard_tol > 0) || !(member_tol >= 0)) throw std::invalid_argument("horizon: tolerances must be positive");
    if (zeno_jumps < 1) throw std::invalid_argument("horizon: zeno_jumps must be at least 1");
}

std::string to_string(ProbeResult::Kind k) {
    return k == ProbeResult::Kind::BoundaryLingering ? "BoundaryLingering" : "ImmediateEntry";
}

namespace {

class Stepper {
public:
    Stepper(const HybridSystem& h, const SelectionPolicy& p, const Horizon& hz)
        : h_(h), policy_(p), hz_(hz), rng_(p.seed) {
        if (p.flow.kind == ParameterRule::Kind::AdversarialGrid) flow_grid_ = parameter_samples(h.F.params(), ImageScheme::lattice(p.flow.grid));
        if (p.jump.kind == ParameterRule::Kind::AdversarialGrid) jump_grid_ = parameter_samples(h.G.params(), ImageScheme::lattice(p.jump.grid));
    }

    bool in_C(const Vec& x) const { return h_.C.value(x) <= hz_.member_tol; }
    bool in_D(const Vec& x) const { return h_.D.contains(x, hz_.member_tol); }

    bool choose_jump() {
        switch (policy_.overlap.kind) {
        case OverlapRule::Kind::PreferFlow: return false;
        case OverlapRule::Kind::PreferJump: return true;
        case OverlapRule::Kind::Bernoulli: return std::bernoulli_distribution(policy_.overlap.p)(rng_);
        }
        return false;
    }

    Vec flow_lambda(const Vec& x) {
        return pick(policy_.flow, h_.F.params(), flow_grid_, [&](const Vec& l) { return x + hz_.step * h_.F(x, l); });
    }
    Vec jump_lambda(const Vec& x) {
        return pick(policy_.jump, h_.G.params(), jump_grid_, [&](const Vec& l) { return h_.G(x, l); });
    }

    Vec rk4(const Vec& x, const Vec& l, double s) const {
        const Vec k1 = h_.F(x, l);
        const Vec k2 = h_.F(x + 0.5 * s * k1, l);
        const Vec k3 = h_.F(x + 0.5 * s * k2, l);
        const Vec k4 = h_.F(x + s * k3, l);
        return x + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

private:
    template <class Next>
    Vec pick(const ParameterRule& rule, int k, const std::vector<Vec>& grid, Next next) {
        switch (rule.kind) {
        case ParameterRule::Kind::Constant:
            if (rule.lambda.size() == 0) return Vec::Zero(k);
            if (rule.lambda.size() == 1) return Vec::Constant(k, rule.lambda[0]);
            if (rule.lambda.size() != k) throw std::invalid_argument("policy: constant λ has the wrong length");
            return rule.lambda;
        case ParameterRule::Kind::PerStepRandom: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            Vec l(k);
            for (int i = 0; i < k; ++i) l[i] = unit(rng_);
            return l;
        }
        case ParameterRule::Kind::AdversarialGrid: {
            if (!policy_.objective) return grid.front();
            Vec best = grid.front();
            double best_v = -std::numeric_limits<double>::infinity();
            for (const auto& l : grid) {
                const double v = (*policy_.objective)(next(l));
                if (std::isfinite(v) && v > best_v) {
                    best_v = v;
                    best = l;
                }
            }
            return best;
        }
        }
        return Vec::Zero(k);
    }

    const HybridSystem& h_;
    const SelectionPolicy& policy_;
    const Horizon& hz_;
    Rng rng_;
    std::vector<Vec> flow_grid_;
    std::vector<Vec> jump_grid_;
};

bool finite(const Vec& x) { return x.allFinite(); }

}  // namespace

HybridArc solve(const HybridSystem& h, const Vec& x0, const SelectionPolicy& policy, const Horizon& horizon) {
    horizon.validate();
    if (x0.size() != h.n) throw std::invalid_argument("solve: x0 has the wrong dimension");
    Stepper st(h, policy, horizon);
    if (!st.in_C(x0) && !st.in_D(x0)) throw PreconditionError("solve: x0 is outside cl(C) ∪ D");

    HybridArc arc;
    arc.intervals.push_back({{0.0}, {x0}});
    Vec x = x0;
    double t = 0.0;
    int idle_jumps = 0;

    auto stop = [&](TerminationCause c) {
        arc.cause = c;
        return arc;
    };
    auto push = [&](double tt, const Vec& xx) {
        arc.intervals.back().t.push_back(tt);
        arc.intervals.back().x.push_back(xx);
    };

    for (;;) {
        const bool c = st.in_C(x);
        const bool d = st.in_D(x);
        if (!c && !d) return stop(TerminationCause::LeftCUnionD);

        bool jump = d && (!c || st.choose_jump());
        if (!jump) {
            if (t >= horizon.T) return stop(TerminationCause::HorizonReached);
            Vec lambda;
            Vec next;
            double s = std::min(horizon.step, horizon.T - t);
            try {
                lambda = st.flow_lambda(x);
                next = st.rk4(x, lambda, s);
            } catch (const EvalError&) {
                return stop(TerminationCause::NumericalFailure);
            }
            if (!finite(next)) return stop(TerminationCause::NumericalFailure);

            auto event = [&](const Vec& y) { return !st.in_C(y) || (!d && st.in_D(y)); };
            if (event(next)) {
                // Locate the first guard crossing along this step.
                double lo = 0.0;
                double hi = s;
                Vec at_hi = next;
                while (hi - lo > horizon.guard_tol) {
                    const double mid = 0.5 * (lo + hi);
                    Vec y;
                    try {
                        y = st.rk4(x, lambda, mid);
                    } catch (const EvalError&) {
                        return stop(TerminationCause::NumericalFailure);
                    }
                    if (event(y)) {
                        hi = mid;
                        at_hi = y;
                    } else {
                        lo = mid;
                    }
                    if (!d && st.in_D(at_hi) && st.in_C(at_hi)) break;
                }
                if (!d && st.in_D(at_hi)) {
                    s = hi;
                    next = at_hi;
                } else if (lo > 2.0 * horizon.guard_tol) {
                    s = lo;
                    next = st.rk4(x, lambda, lo);
                } else {
                    // The selected flow cannot advance inside C.
                    if (d) {
                        jump = true;
                    } else {
                        const auto etas = image_samples(h.F, x, ImageScheme::vertices());
                        const bool any = !filter_by_cone(etas, h.C, x).empty();
                        arc.dies_sampled = !any;
                        return stop(any ? TerminationCause::LeftCUnionD : TerminationCause::SolutionDies);
                    }
                }
            }
            if (!jump) {
                t += s;
                x = next;
                push(t, x);
                idle_jumps = 0;
                continue;
            }
        }

        if (arc.jumps() >= horizon.J) return stop(TerminationCause::HorizonReached);
        if (idle_jumps >= horizon.zeno_jumps) {
            arc.zeno = true;
            return stop(TerminationCause::HorizonReached);
        }
        Vec post;
        try {
            post = h.G(x, st.jump_lambda(x));
        } catch (const EvalError&) {
            return stop(TerminationCause::NumericalFailure);
        }
        if (!finite(post)) return stop(TerminationCause::NumericalFailure);
        x = post;
        arc.intervals.push_back({{t}, {x}});
        ++idle_jumps;
    }
}

std::vector<SelectionPolicy> default_policy_pool(const HybridSystem& h, const KComplex& k, std::uint64_t seed) {
    std::vector<SelectionPolicy> pool;
    const int kf = h.F.params();
    const int kg = h.G.params();
    auto constant = [&](double v) {
        SelectionPolicy p;
        p.flow = ParameterRule::constant(Vec::Constant(kf, v));
        p.jump = ParameterRule::constant(Vec::Constant(kg, v));
        return p;
    };
    pool.push_back(constant(0.0));
    if (kf > 0 || kg > 0) pool.push_back(constant(1.0));
    SelectionPolicy random;
    random.flow = ParameterRule::random();
    random.jump = ParameterRule::random();
    random.overlap = {OverlapRule::Kind::Bernoulli, 0.5};
    random.seed = seed;
    pool.push_back(std::move(random));
    if (kf > 0 || kg > 0) {
        SelectionPolicy adv;
        adv.flow = ParameterRule::adversarial(3);
        adv.jump = ParameterRule::adversarial(3);
        adv.objective = k.Bbar;
        pool.push_back(std::move(adv));
    }
    return pool;
}

namespace {

void tally(FalsifyStats& s, const HybridArc& arc) {
    ++s.runs;
    if (arc.zeno) ++s.zeno;
    switch (arc.cause) {
    case TerminationCause::HorizonReached: ++s.horizon_reached; break;
    case TerminationCause::SolutionDies: ++s.solution_dies; break;
    case TerminationCause::LeftCUnionD: ++s.left_cud; break;
    case TerminationCause::NumericalFailure: ++s.numerical_failure; break;
    }
}

std::vector<Vec> starts_in(const KComplex& k, const FalsifyBudget& b) {
    const int on_boundary = (b.starts + 1) / 2;
    auto pts = detail::sample_set_boundary(k.K, b.box, on_boundary, b.band, split_seed(b.seed, 1), b.workers);
    auto inner = detail::sample_set(k.K, b.box, b.starts - static_cast<int>(pts.size()), split_seed(b.seed, 2), b.workers);
    pts.insert(pts.end(), inner.begin(), inner.end());
    return pts;
}

std::vector<SelectionPolicy> pool_for(const HybridSystem& h, const KComplex& k, const FalsifyBudget& b, std::size_t start) {
    auto pool = b.policies.empty() ? default_policy_pool(h, k, b.seed) : b.policies;
    for (auto& p : pool) p.seed = split_seed(p.seed ^ b.seed, start);
    return pool;
}

}  // namespace

FalsifyResult falsify_invariance(const HybridSystem& h, const KComplex& k, const FalsifyBudget& budget) {
    budget.horizon.validate();
    if (budget.starts < 1) throw std::invalid_argument("falsify: starts must be positive");
    const auto starts = starts_in(k, budget);

    struct Slot {
        FalsifyStats stats;
        std::optional<Counterexample> found;
    };
    std::vector<Slot> slots(starts.size());
    parallel_for(starts.size(), budget.workers, [&](std::size_t i) {
        Slot& slot = slots[i];
        for (const auto& p : pool_for(h, k, budget, i)) {
            HybridArc arc;
            try {
                arc = solve(h, starts[i], p, budget.horizon);
            } catch (const PreconditionError&) {
                continue;
            }
            tally(slot.stats, arc);
            const Scenario sc = scenario_classify(arc, k, budget.exit_tol);
            if (sc.kind == Scenario::Kind::StaysInK) continue;
            if (slot.found && slot.found->exit.t <= sc.t) continue;
            slot.found = Counterexample{static_cast<int>(i), p.to_string(), std::move(arc), sc, k.B(sc.x)};
        }
    });

    FalsifyResult out;
    out.stats.starts = static_cast<int>(starts.size());
    for (auto& s : slots) {
        out.stats.runs += s.stats.runs;
        out.stats.horizon_reached += s.stats.horizon_reached;
        out.stats.solution_dies += s.stats.solution_dies;
        out.stats.left_cud += s.stats.left_cud;
        out.stats.numerical_failure += s.stats.numerical_failure;
        out.stats.zeno += s.stats.zeno;
        if (!out.counterexample && s.found) out.counterexample = std::move(s.found);
    }
    return out;
}

ProbeRun probe_from(const HybridSystem& h, const KComplex& k, const Vec& x0, const SelectionPolicy& policy,
                    const Horizon& horizon, const ProbeOptions& opt, double band) {
    if (k.K.classify(x0, band) != Membership::Boundary) throw PreconditionError("probe: start must lie on ∂K");
    Horizon hz = horizon;
    hz.T = std::min(hz.T, opt.tau);
    ProbeRun run;
    run.start = x0;
    run.policy = policy.to_string();
    run.arc = solve(h, x0, policy, hz);
    run.worst_barrier = -std::numeric_limits<double>::infinity();
    bool first = true;
    for (const auto& iv : run.arc.intervals) {
        for (std::size_t s = 0; s < iv.x.size(); ++s) {
            if (first) {
                first = false;
                continue;
            }
            if (iv.t[s] > opt.tau) break;
            const double b = k.Bbar(iv.x[s]);
            run.worst_barrier = std::max(run.worst_barrier, b);
            if (b > opt.tol) run.left_k = true;
            if (b < -opt.entry_margin) run.entered = true;
        }
    }
    return run;
}

ProbeResult probe_contractivity(const HybridSystem& h, const KComplex& k, const FalsifyBudget& budget,
                                const ProbeOptions& opt) {
    budget.horizon.validate();
    auto raw = detail::sample_set_boundary(k.K, budget.box, budget.starts, budget.band, split_seed(budget.seed, 3),
                                           budget.workers);
    std::vector<Vec> starts;
    for (auto& x : raw) {
        if (k.K.classify(x, budget.band) == Membership::Boundary) starts.push_back(std::move(x));
    }

    struct Slot {
        int runs = 0;
        int entered = 0;
        int stalled = 0;
        std::optional<ProbeRun> lingering;
    };
    std::vector<Slot> slots(starts.size());
    parallel_for(starts.size(), budget.workers, [&](std::size_t i) {
        Slot& slot = slots[i];
        for (const auto& p : pool_for(h, k, budget, i)) {
            ProbeRun run;
            try {
                run = probe_from(h, k, starts[i], p, budget.horizon, opt, budget.band);
            } catch (const PreconditionError&) {
                continue;
            }
            ++slot.runs;
            const bool moved = run.arc.intervals.size() > 1 || run.arc.intervals.front().x.size() > 1;
            if (!moved) {
                ++slot.stalled;
                continue;
            }
            if (run.entered && !run.left_k) {
                ++slot.entered;
            } else if (!slot.lingering) {
                slot.lingering = std::move(run);
            }
        }
    });

    ProbeResult out;
    out.starts = static_cast<int>(starts.size());
    for (auto& s : slots) {
        out.runs += s.runs;
        out.entered += s.entered;
        out.stalled += s.stalled;
        if (!out.witness && s.lingering) out.witness = std::move(s.lingering);
    }
    out.kind = out.witness ? ProbeResult::Kind::BoundaryLingering : ProbeResult::Kind::ImmediateEntry;
    return out;
}

void write_arc_csv(std::ostream& os, const HybridArc& arc, const BarrierCandidate& b) {
    const int n = arc.empty() ? 0 : static_cast<int>(arc.initial().size());
    os << "t,j";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= b.size(); ++i) os << ",B" << i;
    os << ",flag\n";
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (std::size_t j = 0; j < arc.intervals.size(); ++j) {
        const auto& iv = arc.intervals[j];
        for (std::size_t s = 0; s < iv.x.size(); ++s) {
            num(iv.t[s]);
            os << ',' << j;
            for (int i = 0; i < n; ++i) {
                os << ',';
                num(iv.x[s][i]);
            }
            const Vec bv = b(iv.x[s]);
            for (int i = 0; i < bv.size(); ++i) {
                os << ',';
                num(bv[i]);
            }
            const char* flag = s > 0 ? "flow" : (j == 0 ? "init" : "jump");
            os << ',' << flag << '\n';
        }
    }
}

}  // namespace hibarrier
