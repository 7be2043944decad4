#include "hibarrier/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hibarrier {

void HybridSystem::validate() const {
    if (n <= 0) throw std::invalid_argument("system dimension must be positive");
    auto check = [&](int got, const char* what) {
        if (got != n) throw std::invalid_argument(std::string(what) + " has arity " + std::to_string(got) + ", expected " + std::to_string(n));
    };
    check(C.dim(), "C");
    check(D.dim(), "D");
    check(F.arity(), "F");
    check(G.arity(), "G");
}

Vec BarrierCandidate::operator()(const Vec& x) const {
    Vec out(size());
    for (int i = 0; i < size(); ++i) out[i] = components[static_cast<std::size_t>(i)].value(x);
    return out;
}

double BarrierCandidate::scalarized(const Vec& x) const { return (*this)(x).maxCoeff(); }

ScalarField BarrierCandidate::scalar() const { return ScalarField::max_of(components); }

bool BarrierCandidate::all_c1() const {
    return std::all_of(components.begin(), components.end(), [](const auto& c) { return c.smoothness() == Smoothness::C1; });
}

bool HybridTimeDomain::valid() const {
    if (t.empty() || t.front() != 0.0) return false;
    return std::is_sorted(t.begin(), t.end());
}

std::string to_string(TerminationCause c) {
    switch (c) {
        case TerminationCause::HorizonReached: return "HorizonReached";
        case TerminationCause::SolutionDies: return "SolutionDies";
        case TerminationCause::LeftCUnionD: return "LeftCUnionD";
        case TerminationCause::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

HybridTimeDomain HybridArc::domain() const {
    HybridTimeDomain d;
    for (const auto& iv : intervals) {
        d.t.push_back(iv.t.front());
        d.degenerate.push_back(iv.degenerate());
    }
    if (!intervals.empty()) d.t.push_back(intervals.back().t.back());
    return d;
}

bool KComplex::in_K(const Vec& x, double tol) const {
    for (const auto& b : B.components) {
        if (b.value(x) > tol) return false;
    }
    return flow_or_jump.value(x) <= tol;
}

std::vector<Vec> KComplex::sample_M(int i, const Box& box, int count, double band, std::uint64_t seed) const {
    const auto raw = sample(Mi[static_cast<std::size_t>(i)], box, count, seed);
    std::vector<Vec> out;
    for (const auto& x : raw.points) {
        if (std::abs(B.components[static_cast<std::size_t>(i)].value(x)) <= band && K.classify(x, band) == Membership::Boundary) {
            out.push_back(x);
        }
    }
    return out;
}

KComplex build_k_complex(const HybridSystem& h, const BarrierCandidate& b) {
    if (b.size() < 1) throw std::invalid_argument("barrier candidate needs at least one component");
    for (const auto& c : b.components) {
        if (c.arity() != h.n) throw std::invalid_argument("barrier arity does not match the system");
    }
    std::vector<SetDescription> kei;
    for (const auto& c : b.components) kei.push_back(SetDescription::leaf(c));
    const SetDescription ke = kei.size() == 1 ? kei.front() : SetDescription::intersection(kei);
    const SetDescription cud = h.flow_or_jump();
    const SetDescription k = SetDescription::intersection({ke, cud});
    std::vector<SetDescription> mi;
    for (const auto& c : b.components) mi.push_back(SetDescription::intersection({k, SetDescription::leaf(c.negated())}));
    return KComplex{cud, k, ke, std::move(kei), std::move(mi), b, b.scalar()};
}

std::string to_string(ArcViolation::Kind k) {
    switch (k) {
        case ArcViolation::Kind::S0: return "S0";
        case ArcViolation::Kind::S1State: return "S1-state";
        case ArcViolation::Kind::S1Velocity: return "S1-velocity";
        case ArcViolation::Kind::S2PreJump: return "S2-pre-jump";
        case ArcViolation::Kind::S2PostJump: return "S2-post-jump";
        case ArcViolation::Kind::Malformed: return "malformed";
    }
    return "?";
}

double distance_to_hull(const Vec& v, std::span<const Vec> points) {
    std::vector<Vec> shifted;
    shifted.reserve(points.size());
    for (const auto& p : points) shifted.push_back(p - v);
    return min_norm_point(shifted).norm();
}

std::vector<ArcViolation> validate_arc(const HybridArc& arc, const HybridSystem& h, const ArcCheckOptions& opt) {
    std::vector<ArcViolation> out;
    if (arc.empty()) return out;
    using K = ArcViolation::Kind;
    for (std::size_t j = 0; j < arc.intervals.size(); ++j) {
        const auto& iv = arc.intervals[j];
        if (iv.t.empty() || iv.t.size() != iv.x.size()) {
            out.push_back({K::Malformed, static_cast<int>(j), 0.0, Vec(), "interval without matching samples"});
            return out;
        }
        for (std::size_t k = 1; k < iv.t.size(); ++k) {
            if (!(iv.t[k] > iv.t[k - 1])) {
                out.push_back({K::Malformed, static_cast<int>(j), iv.t[k], iv.x[k], "times not strictly increasing"});
                return out;
            }
        }
        if (j > 0 && iv.t.front() != arc.intervals[j - 1].t.back()) {
            out.push_back({K::Malformed, static_cast<int>(j), iv.t.front(), iv.x.front(), "jump changes time"});
        }
    }

    const Vec& x0 = arc.initial();
    if (!(h.C.value(x0) <= opt.tol || h.D.contains(x0, opt.tol))) {
        out.push_back({K::S0, 0, 0.0, x0, "initial state outside cl(C) and D"});
    }

    for (std::size_t j = 0; j < arc.intervals.size(); ++j) {
        const auto& iv = arc.intervals[j];
        if (iv.degenerate()) continue;
        for (std::size_t k = 0; k < iv.t.size(); ++k) {
            if (h.C.value(iv.x[k]) > opt.tol) {
                out.push_back({K::S1State, static_cast<int>(j), iv.t[k], iv.x[k], "flow sample outside C"});
            }
        }
        for (std::size_t k = 0; k + 1 < iv.t.size(); ++k) {
            const double dt = iv.t[k + 1] - iv.t[k];
            const Vec vel = (iv.x[k + 1] - iv.x[k]) / dt;
            auto a = image_samples(h.F, iv.x[k], opt.scheme);
            auto b = image_samples(h.F, iv.x[k + 1], opt.scheme);
            double drift = 0.0;
            for (std::size_t m = 0; m < a.size(); ++m) drift = std::max(drift, (a[m] - b[m]).norm());
            std::vector<Vec> hull = a;
            hull.insert(hull.end(), b.begin(), b.end());
            // First-order model: the chord velocity may deviate by the image drift across the step.
            const double allowed = opt.tol + drift + dt * (1.0 + vel.norm());
            const double gap = distance_to_hull(vel, hull);
            if (gap > allowed) {
                out.push_back({K::S1Velocity, static_cast<int>(j), iv.t[k], iv.x[k],
                               "velocity " + format_vec(vel) + " is " + std::to_string(gap) + " from F"});
            }
        }
    }

    for (std::size_t j = 1; j < arc.intervals.size(); ++j) {
        const Vec& pre = arc.intervals[j - 1].x.back();
        const Vec& post = arc.intervals[j].x.front();
        const double t = arc.intervals[j].t.front();
        if (!h.D.contains(pre, opt.tol)) {
            out.push_back({K::S2PreJump, static_cast<int>(j), t, pre, "jump from a state outside D"});
            continue;
        }
        const auto images = image_samples(h.G, pre, opt.scheme);
        if (distance_to_hull(post, images) > opt.tol) {
            out.push_back({K::S2PostJump, static_cast<int>(j), t, post, "post-jump state not in G(pre-jump)"});
        }
    }
    return out;
}

std::string to_string(Scenario::Kind k) {
    switch (k) {
        case Scenario::Kind::StaysInK: return "StaysInK";
        case Scenario::Kind::LeavesByJump: return "LeavesByJump";
        case Scenario::Kind::LeavesByFlow: return "LeavesByFlow";
    }
    return "?";
}

Scenario scenario_classify(const HybridArc& arc, const KComplex& k, double tol) {
    for (std::size_t j = 0; j < arc.intervals.size(); ++j) {
        const auto& iv = arc.intervals[j];
        for (std::size_t s = 0; s < iv.x.size(); ++s) {
            if (k.in_K(iv.x[s], tol)) continue;
            Scenario sc;
            sc.kind = (s == 0 && j > 0) ? Scenario::Kind::LeavesByJump : Scenario::Kind::LeavesByFlow;
            sc.t = iv.t[s];
            sc.j = static_cast<int>(j);
            sc.x = iv.x[s];
            return sc;
        }
    }
    return {};
}

}  // namespace hibarrier
