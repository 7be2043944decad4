#include "hibarrier/certificates.hpp"

#include "regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace hibarrier {

using detail::Anchor;

void CheckConfig::validate(int n) const {
    if (!(radius > band && band > 0.0)) throw std::invalid_argument("check config needs radius > band > 0");
    if (samples < 1) throw std::invalid_argument("check config needs at least one sample per region");
    if (!(margin_strict > 0.0)) throw std::invalid_argument("margin_strict must be positive");
    if (!(tol_eq >= 0.0)) throw std::invalid_argument("tol_eq must be nonnegative");
    if (box.dim() != n || box.hi.size() != n) throw std::invalid_argument("bounding box dimension does not match the system");
    if (!((box.hi.array() > box.lo.array()).all())) throw std::invalid_argument("bounding box is empty");
    if (workers < 1) throw std::invalid_argument("workers must be at least 1");
    if (!cone.h.valid()) throw std::invalid_argument("invalid h-sequence");
}

// ---------------------------------------------------------------- uniqueness functions

UniquenessFunction UniquenessFunction::linear(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("linear uniqueness function needs k > 0");
    return {Kind::Linear, k, std::nullopt};
}

UniquenessFunction UniquenessFunction::osgood() { return {Kind::Osgood, 0.0, std::nullopt}; }

UniquenessFunction UniquenessFunction::custom(ScalarField rho) {
    if (rho.arity() != 1) throw std::invalid_argument("custom uniqueness function must take one argument");
    return {Kind::Custom, 0.0, std::move(rho)};
}

UniquenessFunction UniquenessFunction::parse(const std::string& text) {
    if (text == "osgood") return osgood();
    if (text.rfind("linear:", 0) == 0) {
        const std::string num = text.substr(7);
        std::size_t used = 0;
        double k = 0.0;
        try {
            k = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != num.size()) throw std::invalid_argument("bad slope in '" + text + "'");
        return linear(k);
    }
    throw std::invalid_argument("unknown uniqueness function '" + text + "' (expected linear:k or osgood)");
}

double UniquenessFunction::operator()(double w) const {
    switch (kind_) {
        case Kind::Linear: return k_ * w;
        case Kind::Osgood: return w > 0.0 ? w * std::log(w) : 0.0;
        case Kind::Custom: return (*f_)(Vec::Constant(1, w));
    }
    return 0.0;
}

std::string UniquenessFunction::to_string() const {
    switch (kind_) {
        case Kind::Linear: {
            std::ostringstream os;
            os.precision(17);
            os << "linear:" << k_;
            return os.str();
        }
        case Kind::Osgood: return "osgood";
        case Kind::Custom: return "custom:" + f_->label();
    }
    return "?";
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::NoViolationFound: return "NoViolationFound";
        case CheckStatus::Violated: return "Violated";
        case CheckStatus::Inconclusive: return "Inconclusive";
    }
    return "?";
}

bool Verdict::has_flag(const std::string& f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

std::vector<const Evaluation*> Verdict::evaluations_of(const std::string& condition) const {
    std::vector<const Evaluation*> out;
    for (const auto& e : evaluations) {
        if (e.condition == condition) out.push_back(&e);
    }
    return out;
}

namespace {

// Region seeds; fixed so a region draws the same points whichever check asks.
enum SeedTag : std::uint64_t {
    kTagM = 1,
    kTagBand,
    kTagJump,
    kTagMC,
    kTagEdge,
    kTagNear,
    kTagPairs,
    kTagKC,
    kTagExit,
    kTagBoundaryK,
    kTagClarke,
    kTagConvex,
    kTagRegion,
};

std::uint64_t region_seed(const CheckConfig& cfg, std::uint64_t tag, std::uint64_t index = 0) {
    return split_seed(split_seed(cfg.seed, tag), index);
}

std::string indexed(const std::string& base, int i) { return base + "[" + std::to_string(i + 1) + "]"; }

Evaluation at_most(std::string cond, const Vec& x, std::optional<Vec> eta, double value, double bound, double tol) {
    return {std::move(cond), x, std::move(eta), value, bound, !(value <= bound + tol)};
}

Evaluation below(std::string cond, const Vec& x, std::optional<Vec> eta, double value, double bound, double margin) {
    return {std::move(cond), x, std::move(eta), value, bound, !(value < bound - margin)};
}

bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

class Collector {
public:
    Collector(std::string check, const CheckConfig& cfg) {
        v_.check = std::move(check);
        v_.config = cfg;
    }

    void add(std::vector<Evaluation> evs) {
        for (auto& e : evs) v_.evaluations.push_back(std::move(e));
    }
    void points(std::size_t n) { v_.samples += static_cast<int>(n); }
    void flag(const std::string& f) {
        if (!v_.has_flag(f)) v_.flags.push_back(f);
    }
    void note(std::string n) { v_.notes.push_back(std::move(n)); }
    void inconclusive(std::string why) {
        inconclusive_ = true;
        note(std::move(why));
    }
    void inconclusive_witness(Witness w, std::string why) {
        extra_.push_back(std::move(w));
        inconclusive(std::move(why));
    }
    void errors(int n) { errors_ += n; }

    Verdict finish() && {
        std::vector<Witness> found;
        v_.worst_margin = v_.evaluations.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
        for (const auto& e : v_.evaluations) {
            auto& s = v_.conditions[e.condition];
            if (s.evaluations == 0) s.worst_margin = -std::numeric_limits<double>::infinity();
            ++s.evaluations;
            s.worst_margin = std::max(s.worst_margin, e.margin());
            v_.worst_margin = std::max(v_.worst_margin, e.margin());
            if (e.violated) {
                ++s.violations;
                found.push_back({e.x, e.eta, e.condition, e.value, e.bound});
            }
        }
        const bool violated = !found.empty();
        found.insert(found.end(), extra_.begin(), extra_.end());
        std::stable_sort(found.begin(), found.end(), [](const Witness& a, const Witness& b) {
            if (a.condition != b.condition) return a.condition < b.condition;
            const double na = a.x.norm();
            const double nb = b.x.norm();
            if (na != nb) return na < nb;
            if (lex_less(a.x, b.x) || lex_less(b.x, a.x)) return lex_less(a.x, b.x);
            const Vec ea = a.eta.value_or(Vec());
            const Vec eb = b.eta.value_or(Vec());
            return lex_less(ea, eb);
        });
        std::map<std::string, int> kept;
        for (auto& w : found) {
            if (kept[w.condition]++ < v_.config.max_witnesses) v_.witnesses.push_back(std::move(w));
        }
        if (errors_ > 0) {
            flag("evaluation-errors");
            note(std::to_string(errors_) + " sample points raised evaluation errors and were skipped");
        }
        if (violated) {
            v_.status = CheckStatus::Violated;
        } else if (inconclusive_ || (errors_ > 0 && v_.evaluations.empty())) {
            v_.status = CheckStatus::Inconclusive;
        } else {
            v_.status = CheckStatus::NoViolationFound;
            if (v_.evaluations.empty()) {
                v_.vacuous = true;
                flag("vacuous");
            }
        }
        return std::move(v_);
    }

private:
    Verdict v_;
    std::vector<Witness> extra_;
    bool inconclusive_ = false;
    int errors_ = 0;
};

using PointEval = std::function<void(std::size_t, const Vec&, std::vector<Evaluation>&)>;

// Evaluates every point independently; per-index slots keep the order fixed.
void evaluate(std::span<const Vec> pts, const CheckConfig& cfg, Collector& out, const PointEval& body) {
    std::vector<std::vector<Evaluation>> slots(pts.size());
    std::vector<char> failed(pts.size(), 0);
    parallel_for(pts.size(), cfg.workers, [&](std::size_t i) {
        try {
            body(i, pts[i], slots[i]);
        } catch (const EvalError&) {
            slots[i].clear();
            failed[i] = 1;
        } catch (const NonConvergence&) {
            slots[i].clear();
            failed[i] = 1;
        }
    });
    out.points(pts.size());
    out.errors(static_cast<int>(std::count(failed.begin(), failed.end(), 1)));
    for (auto& s : slots) out.add(std::move(s));
}

struct Context {
    const HybridSystem& h;
    KComplex k;
    const CheckConfig& cfg;
    SetDescription kc;  // K ∩ C, which equals K_e ∩ C

    Context(const HybridSystem& sys, const BarrierCandidate& b, const CheckConfig& c)
        : h(sys), k(build_k_complex(sys, b)), cfg(c), kc(SetDescription::intersection({k.Ke, sys.C})) {
        sys.validate();
        c.validate(sys.n);
    }

    std::vector<Vec> flow_images(const Vec& x) const { return image_samples(h.F, x, cfg.scheme); }
    std::vector<Vec> flow_in_tc(const Vec& x) const { return filter_by_cone(flow_images(x), h.C, x, cfg.cone); }
    DistanceOptions distance_options() const { return {}; }
};

ScalarField scalar_candidate(const BarrierCandidate& b) {
    return b.size() == 1 ? b.components.front() : ScalarField::max_of(b.components);
}

// ---------------------------------------------------------------- regions

std::vector<Vec> m_points(const Context& c, int i) {
    return detail::chunked(c.cfg.samples, region_seed(c.cfg, kTagM, static_cast<std::uint64_t>(i)), c.cfg.workers,
                           [&](int count, std::uint64_t sd) { return c.k.sample_M(i, c.cfg.box, count, c.cfg.band, sd); });
}

// (U_r(M_i) \ K_ei) ∩ C
std::vector<Vec> band_points(const Context& c, int i) {
    const auto anchors = detail::with_radius(m_points(c, i), c.cfg.radius);
    const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
    const SetDescription target = SetDescription::intersection({c.h.C, SetDescription::leaf(bi.negated())});
    return detail::sample_near(anchors, target, c.cfg.samples, region_seed(c.cfg, kTagBand, static_cast<std::uint64_t>(i)),
                               c.cfg.workers, [&](const Vec& z) { return bi(z) > 0.0; });
}

// M_i ∩ C
std::vector<Vec> m_in_c_points(const Context& c, int i) {
    const SetDescription s = SetDescription::intersection({c.k.Mi[static_cast<std::size_t>(i)], c.h.C});
    auto pts = detail::sample_set(s, c.cfg.box, c.cfg.samples, region_seed(c.cfg, kTagMC, static_cast<std::uint64_t>(i)), c.cfg.workers);
    const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
    std::erase_if(pts, [&](const Vec& x) { return !(std::abs(bi(x)) <= c.cfg.band); });
    return pts;
}

std::vector<Vec> jump_points(const Context& c) {
    const SetDescription s = SetDescription::intersection({c.h.D, c.k.Ke});
    return detail::sample_set(s, c.cfg.box, c.cfg.samples, region_seed(c.cfg, kTagJump), c.cfg.workers);
}

// ∂K_e ∩ ∂C, with ∂C read off the membership band.
std::vector<Vec> edge_points(const Context& c) {
    const SetDescription s = SetDescription::intersection({detail::boundary_of_Ke(c.k), c.h.C});
    auto pts = detail::sample_set(s, c.cfg.box, c.cfg.samples, region_seed(c.cfg, kTagEdge), c.cfg.workers);
    std::erase_if(pts, [&](const Vec& x) { return c.h.C.classify(x, c.cfg.band) != Membership::Boundary; });
    return pts;
}

// K ∩ ∂C
std::vector<Vec> k_on_c_boundary(const Context& c) {
    const SetDescription s = SetDescription::intersection({c.k.Ke, c.h.C, c.h.C.complement()});
    auto pts = detail::sample_set(s, c.cfg.box, c.cfg.samples, region_seed(c.cfg, kTagExit), c.cfg.workers);
    std::erase_if(pts, [&](const Vec& x) { return c.h.C.classify(x, c.cfg.band) != Membership::Boundary; });
    return pts;
}

// (K ∩ ∂C) \ D
std::vector<Vec> exit_points(const Context& c) {
    auto pts = k_on_c_boundary(c);
    std::erase_if(pts, [&](const Vec& x) { return detail::robustly_in(c.h.D, x, c.cfg.band); });
    return pts;
}

// Neighborhoods of (K∩∂C)\D, shrunk to stay clear of D.
std::vector<Vec> exit_neighborhoods(const Context& c, const std::vector<Vec>& exits) {
    std::vector<Anchor> anchors;
    for (const auto& a : exits) {
        double r = c.cfg.radius;
        try {
            const double d = distance(c.h.D, a);
            if (d > 0.0) r = std::min(r, 0.5 * d);
        } catch (const NonConvergence&) {
            // D is empty: keep the configured radius.
        }
        anchors.push_back({a, r});
    }
    auto near = detail::sample_near(anchors, c.kc, c.cfg.samples, region_seed(c.cfg, kTagNear), c.cfg.workers,
                                    [&](const Vec& z) { return c.h.C.classify(z, c.cfg.band) == Membership::Boundary; });
    std::vector<Vec> out = exits;
    out.insert(out.end(), near.begin(), near.end());
    return out;
}

// ---------------------------------------------------------------- shared legs

double flow_value(const ScalarField& b, const Vec& x, const Vec& eta) { return gradient(b, x).dot(eta); }

void jump_legs(const Context& c, Collector& out, bool strict) {
    const auto pts = jump_points(c);
    out.flag("sampled-containment");
    const auto& cfg = c.cfg;
    evaluate(pts, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
        const bool on_boundary = c.k.K.classify(x, cfg.band) == Membership::Boundary;
        for (const auto& eta : image_samples(c.h.G, x, cfg.scheme)) {
            for (int j = 0; j < c.k.B.size(); ++j) {
                const double v = c.k.B.components[static_cast<std::size_t>(j)].value(eta);
                if (strict) {
                    evs.push_back(below(indexed("strict-jump-barrier", j), x, eta, v, 0.0, cfg.margin_strict));
                } else {
                    evs.push_back(at_most(indexed("jump-barrier", j), x, eta, v, 0.0, cfg.tol_eq));
                }
            }
            const double cd = c.k.flow_or_jump.value(eta);
            evs.push_back(at_most("jump-in-CuD", x, eta, cd, 0.0, cfg.tol_eq));
            if (strict && on_boundary) evs.push_back(below("jump-interior", x, eta, cd, 0.0, cfg.margin_strict));
        }
    });
}

enum class Strictness { Loose, Strict };

using Bound = std::function<double(int i, const Vec& x)>;

// ⟨∇B_i, η⟩ against a bound over the outside bands, with η ∈ F(x) ∩ T_C(x).
void band_flow_legs(const Context& c, Collector& out, const Bound& bound) {
    for (int i = 0; i < c.k.B.size(); ++i) {
        const auto pts = band_points(c, i);
        const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
        evaluate(pts, c.cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
            const double rhs = bound(i, x);
            for (const auto& eta : c.flow_in_tc(x)) {
                evs.push_back(at_most(indexed("flow", i), x, eta, flow_value(bi, x, eta), rhs, c.cfg.tol_eq));
            }
        });
    }
}

// Clarke support of a scalar candidate over the outside band.
void band_clarke_legs(const Context& c, Collector& out, const Bound& bound) {
    const ScalarField& b = c.k.B.components.front();
    const auto pts = band_points(c, 0);
    out.flag("clarke_sampled");
    evaluate(pts, c.cfg, out, [&](std::size_t idx, const Vec& x, std::vector<Evaluation>& evs) {
        const auto cs = clarke_sample(b, x, c.cfg.clarke_radius, c.cfg.clarke_samples, region_seed(c.cfg, kTagClarke, idx));
        const double rhs = bound(0, x);
        for (const auto& eta : c.flow_in_tc(x)) {
            evs.push_back(at_most("clarke-flow", x, eta, clarke_support(cs, eta), rhs, c.cfg.tol_eq));
        }
    });
}

bool require_c1(const BarrierCandidate& b, Collector& out) {
    if (b.all_c1()) return true;
    out.inconclusive("this check needs every barrier component tagged c1");
    return false;
}

// Smallest sampled dist(x + h v, S)/h; zero when the ray enters S.
double cone_defect(const SetDescription& s, const Vec& x, const Vec& v, const HSequence& hs) {
    double best = std::numeric_limits<double>::infinity();
    double h = hs.h0;
    for (int k = 0; k < hs.count; ++k, h *= hs.decay) {
        const Vec y = x + h * v;
        if (s.value(y) <= 0.0) return 0.0;
        best = std::min(best, distance(s, y) / h);
    }
    return best;
}

// The tangent cone of S at x, or its defect when v is outside it.
std::pair<bool, double> cone_test(const SetDescription& s, const Vec& x, const Vec& v, const ConeOptions& opt) {
    if (contingent_cone_member(s, x, v, opt)) return {true, 0.0};
    return {false, cone_defect(s, x, v, opt.h)};
}

// Largest difference quotient over the smallest half of the h-sequence.
template <class Fn>
double limsup_rate(const Fn& f, const Vec& x, const Vec& eta, const HSequence& hs) {
    const double f0 = f(x);
    double worst = -std::numeric_limits<double>::infinity();
    double h = hs.h0;
    for (int k = 0; k < hs.count; ++k, h *= hs.decay) {
        if (k < hs.count / 2) continue;
        worst = std::max(worst, (f(x + h * eta) - f0) / h);
    }
    return worst;
}

std::vector<Vec> with_edge_directions(std::vector<Vec> etas) {
    const std::size_t m = etas.size();
    if (m < 2 || m > 16) return etas;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) etas.push_back(0.5 * (etas[a] + etas[b]));
    }
    return etas;
}

// v in the linearized tangent cone of ∂C ∩ ∂K at x: tangent to some active
// leaf of C and to some active component of B, inward for the rest.
bool tangent_to_edge(const Context& c, const Vec& x, const Vec& v) {
    const double band = c.cfg.band;
    auto flat = [&](const Vec& g) { return std::abs(g.dot(v)) <= 1e-9 * (1.0 + g.norm() * v.norm()); };
    auto inward = [&](const Vec& g) { return g.dot(v) <= 1e-9 * (1.0 + g.norm() * v.norm()); };
    std::vector<Vec> bgrads;
    for (const auto& b : c.k.B.components) {
        if (std::abs(b(x)) <= band) bgrads.push_back(gradient(b, x));
    }
    const bool b_ok = bgrads.empty() || (std::all_of(bgrads.begin(), bgrads.end(), inward) &&
                                         std::any_of(bgrads.begin(), bgrads.end(), flat));
    if (!b_ok) return false;
    for (const auto& clause : c.h.C.clauses()) {
        std::vector<Vec> cgrads;
        bool holds = true;
        for (const auto& leaf : clause) {
            const double val = leaf.constraint(x);
            if (val > band) {
                holds = false;
                break;
            }
            if (std::abs(val) <= band) cgrads.push_back(gradient(leaf.constraint, x));
        }
        if (!holds || cgrads.empty()) continue;
        if (std::all_of(cgrads.begin(), cgrads.end(), inward) && std::any_of(cgrads.begin(), cgrads.end(), flat)) return true;
    }
    return false;
}

// F(x) ∩ T_{∂C∩∂K}(x) = ∅ on sampled ∂K ∩ ∂C.
void edge_emptiness_legs(const Context& c, Collector& out) {
    auto pts = k_on_c_boundary(c);
    std::erase_if(pts, [&](const Vec& x) { return c.k.K.classify(x, c.cfg.band) != Membership::Boundary; });
    out.flag("edge-cone-linearized");
    evaluate(pts, c.cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
        for (const auto& eta : with_edge_directions(c.flow_images(x))) {
            const bool tangent = eta.norm() == 0.0 || tangent_to_edge(c, x, eta);
            evs.push_back({"flow-along-edge", x, eta, tangent ? 1.0 : 0.0, 0.0, tangent});
        }
    });
}

void escape_flags(const Context& c, Collector& out) {
    const auto pts = detail::sample_set(c.kc, c.cfg.box, c.cfg.samples, region_seed(c.cfg, kTagKC), c.cfg.workers);
    if (pts.empty()) {
        out.flag("no-finite-escape:empty");
        return;
    }
    const bool inside = std::all_of(pts.begin(), pts.end(), [&](const Vec& x) { return detail::depth_in_box(c.cfg.box, x) > c.cfg.radius; });
    if (inside) {
        out.flag("no-finite-escape:compact-in-box");
        return;
    }
    double sup = 0.0;
    for (const auto& x : pts) {
        try {
            for (const auto& eta : c.flow_images(x)) sup = std::max(sup, eta.norm());
        } catch (const EvalError&) {
            sup = std::numeric_limits<double>::infinity();
        }
    }
    if (sup < c.cfg.flow_bound) {
        out.flag("no-finite-escape:bounded-flow");
    } else {
        out.flag("finite-escape-not-excluded");
        out.note("K ∩ C reaches the bounding box and sampled |F| is not bounded; finite escape is not excluded");
    }
}

// Some sampled η ∈ F(x) lies in T_S(x) at every point.
void existence_legs(const Context& c, Collector& out, const std::vector<Vec>& pts, const SetDescription& s,
                    const std::string& cond) {
    evaluate(pts, c.cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
        double best = std::numeric_limits<double>::infinity();
        Vec best_eta;
        for (const auto& eta : with_edge_directions(c.flow_images(x))) {
            const auto [member, defect] = cone_test(s, x, eta, c.cfg.cone);
            const double d = member ? 0.0 : defect;
            if (d < best) {
                best = d;
                best_eta = eta;
            }
            if (member) break;
        }
        if (best_eta.size() == 0) return;
        evs.push_back({cond, x, best_eta, best, c.cfg.cone.tol, best > 0.0});
    });
}

// ---------------------------------------------------------------- option legs

void transversality_legs(const Context& c, Collector& out, const std::vector<Vec>& pts, const std::string& cond) {
    evaluate(pts, c.cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
        std::vector<Vec> grads;
        for (const auto& b : c.k.B.components) {
            if (std::abs(b(x)) <= c.cfg.band) grads.push_back(gradient(b, x));
        }
        if (grads.empty()) return;
        const auto t = transversality_check(grads);
        evs.push_back({cond, x, std::nullopt, t.best_max, 0.0, !t.feasible});
    });
}

void lipschitz_like_legs(const Context& c, Collector& out, const UniquenessFunction& rho) {
    std::vector<Vec> xs;
    for (int i = 0; i < c.k.B.size(); ++i) {
        auto band = band_points(c, i);
        xs.insert(xs.end(), band.begin(), band.end());
    }
    std::vector<Vec> partners;
    if (c.cfg.full_pair_sampling) {
        partners = detail::sample_set_boundary(c.kc, c.cfg.box, c.cfg.samples, c.cfg.band, region_seed(c.cfg, kTagBoundaryK),
                                               c.cfg.workers);
        if (partners.empty()) return;
        out.flag("full-pair-sampling");
    } else {
        out.flag("projection-paired");
    }
    evaluate(xs, c.cfg, out, [&](std::size_t idx, const Vec& x, std::vector<Evaluation>& evs) {
        Vec y;
        if (partners.empty()) {
            y = nearest(c.kc, x).point;
        } else {
            Rng rng(region_seed(c.cfg, kTagPairs, idx));
            y = partners[static_cast<std::size_t>(rng() % partners.size())];
        }
        const Vec d = x - y;
        const double w = d.norm();
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& ey : c.flow_images(y)) {
            lo = std::min(lo, d.dot(ey));
            hi = std::max(hi, d.dot(ey));
        }
        // The bound uses |ρ| so that ω log ω, negative below 1, still measures a spread.
        const double bound = w * std::abs(rho(w));
        for (const auto& ex : c.flow_images(x)) {
            const double s = d.dot(ex);
            const double residual = std::max({lo - s, s - hi, 0.0});
            evs.push_back(at_most("lipschitz-like", x, ex, residual, bound, c.cfg.tol_eq));
        }
    });
}

void option_a_legs(const Context& c, Collector& out, const std::vector<Vec>& edges) {
    const auto anchors = detail::with_radius(edges, c.cfg.radius);
    const auto pts = detail::sample_near(anchors, detail::boundary_of_Ke(c.k), c.cfg.samples,
                                         region_seed(c.cfg, kTagRegion, 1), c.cfg.workers,
                                         [&](const Vec& z) { return c.h.C.value(z) > 0.0; });
    transversality_legs(c, out, pts, "option-a-transversality");
    evaluate(pts, c.cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
        const auto etas = c.flow_images(x);
        for (int i = 0; i < c.k.B.size(); ++i) {
            const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
            if (std::abs(bi(x)) > c.cfg.band) continue;
            for (const auto& eta : etas) evs.push_back(at_most(indexed("option-a", i), x, eta, flow_value(bi, x, eta), 0.0, c.cfg.tol_eq));
        }
    });
}

// F(x) ⊂ T_{K∩C}(x) at every point.
void inclusion_legs(const Context& c, Collector& out, const std::vector<Vec>& pts, const std::string& cond) {
    evaluate(pts, c.cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
        for (const auto& eta : c.flow_images(x)) {
            const auto [member, defect] = cone_test(c.kc, x, eta, c.cfg.cone);
            evs.push_back({cond, x, eta, defect, c.cfg.cone.tol, !member});
        }
    });
}

void option_b_legs(const Context& c, Collector& out, const std::vector<Vec>& edges) {
    const auto anchors = detail::with_radius(edges, c.cfg.radius);
    const auto pts = detail::sample_near(anchors, c.kc, c.cfg.samples, region_seed(c.cfg, kTagRegion, 2), c.cfg.workers,
                                         [&](const Vec& z) {
                                             return c.h.C.classify(z, c.cfg.band) == Membership::Boundary &&
                                                    c.k.K.classify(z, c.cfg.band) == Membership::Boundary;
                                         });
    inclusion_legs(c, out, pts, "option-b");
}

// Midpoint membership over random pairs; returns a failing midpoint.
std::optional<Vec> convexity_counterexample(const SetDescription& s, const CheckConfig& cfg, std::uint64_t seed) {
    const auto pts = detail::sample_set(s, cfg.box, cfg.samples, seed, cfg.workers);
    if (pts.size() < 2) return std::nullopt;
    Rng rng(split_seed(seed, 0xc0));
    std::optional<Vec> worst;
    double worst_value = cfg.tol_eq;
    for (int k = 0; k < 4 * cfg.samples; ++k) {
        const Vec& a = pts[static_cast<std::size_t>(rng() % pts.size())];
        const Vec& b = pts[static_cast<std::size_t>(rng() % pts.size())];
        const Vec mid = 0.5 * (a + b);
        const double v = s.value(mid);
        if (v > worst_value) {
            worst_value = v;
            worst = mid;
        }
    }
    return worst;
}

}  // namespace

// ---------------------------------------------------------------- checks

Verdict check_thm1(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg) {
    Collector out("thm1", cfg);
    if (!require_c1(b, out)) return std::move(out).finish();
    const Context c(h, b, cfg);
    band_flow_legs(c, out, [](int, const Vec&) { return 0.0; });
    jump_legs(c, out, false);
    return std::move(out).finish();
}

Verdict check_thm_boundary(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg,
                           const UniquenessFunction& rho, BoundaryOption option) {
    Collector out("boundary", cfg);
    if (!require_c1(b, out)) return std::move(out).finish();
    const Context c(h, b, cfg);
    if (rho.kind() == UniquenessFunction::Kind::Custom) out.flag("custom-uniqueness-function");

    for (int i = 0; i < c.k.B.size(); ++i) {
        const auto pts = m_in_c_points(c, i);
        const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
        evaluate(pts, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
            for (const auto& eta : c.flow_images(x)) {
                evs.push_back(at_most(indexed("boundary-flow", i), x, eta, flow_value(bi, x, eta), 0.0, cfg.tol_eq));
            }
        });
    }

    {
        const SetDescription s = SetDescription::intersection({detail::boundary_of_Ke(c.k), h.C});
        const auto pts = detail::sample_set(s, cfg.box, cfg.samples, region_seed(cfg, kTagRegion, 0), cfg.workers);
        transversality_legs(c, out, pts, "transversality");
    }

    lipschitz_like_legs(c, out, rho);

    const auto edges = edge_points(c);
    switch (option) {
        case BoundaryOption::A: option_a_legs(c, out, edges); break;
        case BoundaryOption::B: option_b_legs(c, out, edges); break;
        case BoundaryOption::C: {
            if (const auto mid = convexity_counterexample(h.C, cfg, region_seed(cfg, kTagConvex))) {
                out.inconclusive_witness({*mid, std::nullopt, "option-c-convexity", h.C.value(*mid), 0.0},
                                         "C failed the midpoint convexity spot-check at " + format_vec(*mid));
            } else {
                out.flag("convexity-sampled");
                inclusion_legs(c, out, edges, "option-c");
            }
            break;
        }
    }
    jump_legs(c, out, false);
    return std::move(out).finish();
}

Verdict check_thm_external(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg) {
    Collector out("external", cfg);
    const Context c(h, b, cfg);
    for (int i = 0; i < c.k.B.size(); ++i) {
        const auto pts = band_points(c, i);
        evaluate(pts, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
            const double d0 = distance(c.k.K, x);
            for (const auto& eta : c.flow_in_tc(x)) {
                // Smallest first-order growth of the distance to K along the h-sequence.
                double rate = std::numeric_limits<double>::infinity();
                double hh = cfg.cone.h.h0;
                for (int k = 0; k < cfg.cone.h.count; ++k, hh *= cfg.cone.h.decay) {
                    const Vec y = x + hh * eta;
                    const double d = c.k.K.value(y) <= 0.0 ? 0.0 : distance(c.k.K, y);
                    rate = std::min(rate, (d - d0) / hh);
                    if (rate <= cfg.cone.tol) break;
                }
                evs.push_back({indexed("external-flow", i), x, eta, rate, cfg.cone.tol, !(rate <= cfg.cone.tol)});
            }
        });
    }
    jump_legs(c, out, false);
    return std::move(out).finish();
}

Verdict check_thm_lipschitz(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg) {
    Collector out("lipschitz", cfg);
    const BarrierCandidate scalar{{scalar_candidate(b)}};
    if (b.size() > 1) out.note("vector candidate scalarized as max_i B_i");
    const Context c(h, scalar, cfg);
    band_clarke_legs(c, out, [](int, const Vec&) { return 0.0; });
    jump_legs(c, out, false);
    return std::move(out).finish();
}

Verdict check_relaxed(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg, const UniquenessFunction& rho) {
    Collector out("relaxed", cfg);
    if (rho.kind() == UniquenessFunction::Kind::Custom) out.flag("custom-uniqueness-function");
    if (b.all_c1()) {
        const Context c(h, b, cfg);
        band_flow_legs(c, out, [&](int i, const Vec& x) { return rho(c.k.B.components[static_cast<std::size_t>(i)].value(x)); });
        jump_legs(c, out, false);
    } else {
        const BarrierCandidate scalar{{scalar_candidate(b)}};
        out.note("non-c1 candidate: Clarke support against ρ(B(x)) for the scalarized candidate");
        const Context c(h, scalar, cfg);
        band_clarke_legs(c, out, [&](int, const Vec& x) { return rho(c.k.B.components.front().value(x)); });
        jump_legs(c, out, false);
    }
    return std::move(out).finish();
}

Verdict check_invariance_completion(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg,
                                    CompletionMode mode) {
    Collector out("invariance", cfg);
    const Context c(h, b, cfg);
    escape_flags(c, out);
    const auto exits = exit_points(c);
    if (mode == CompletionMode::NontrivialFlow) {
        existence_legs(c, out, exits, c.kc, "nontrivial-flow");
    } else {
        existence_legs(c, out, exit_neighborhoods(c, exits), c.kc, "flow-into-KC");
    }
    return std::move(out).finish();
}

Verdict check_contractive_c1(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg) {
    Collector out("contract-c1", cfg);
    if (!require_c1(b, out)) return std::move(out).finish();
    const Context c(h, b, cfg);
    for (int i = 0; i < c.k.B.size(); ++i) {
        const auto pts = m_in_c_points(c, i);
        const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
        evaluate(pts, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
            for (const auto& eta : c.flow_in_tc(x)) {
                evs.push_back(below(indexed("strict-flow", i), x, eta, flow_value(bi, x, eta), 0.0, cfg.margin_strict));
            }
        });
    }
    edge_emptiness_legs(c, out);
    jump_legs(c, out, true);
    return std::move(out).finish();
}

Verdict check_contractive_lip(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg) {
    Collector out("contract-lip", cfg);
    const BarrierCandidate scalar{{scalar_candidate(b)}};
    if (b.size() > 1) out.note("vector candidate scalarized as max_i B_i");
    const Context c(h, scalar, cfg);
    const ScalarField& bs = c.k.B.components.front();
    // All of K_e ∩ C, interior included.
    const auto pts = detail::sample_set(c.kc, cfg.box, cfg.samples, region_seed(cfg, kTagKC), cfg.workers);
    out.flag("clarke_sampled");
    evaluate(pts, cfg, out, [&](std::size_t idx, const Vec& x, std::vector<Evaluation>& evs) {
        const auto cs = clarke_sample(bs, x, cfg.clarke_radius, cfg.clarke_samples, region_seed(cfg, kTagClarke, idx));
        for (const auto& eta : c.flow_in_tc(x)) {
            evs.push_back(below("strict-clarke-flow", x, eta, clarke_support(cs, eta), 0.0, cfg.margin_strict));
        }
    });
    const Context full(h, b, cfg);
    edge_emptiness_legs(full, out);
    jump_legs(full, out, true);
    return std::move(out).finish();
}

Verdict check_contractivity_completion(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg) {
    Collector out("contract-complete", cfg);
    const Context c(h, b, cfg);
    escape_flags(c, out);
    const auto exits = exit_points(c);
    existence_legs(c, out, exit_neighborhoods(c, exits), h.C, "flow-into-C");
    return std::move(out).finish();
}

Verdict check_cset(const HybridSystem& h, const std::optional<BarrierCandidate>& b, const CheckConfig& cfg,
                   CsetDirection direction) {
    Collector out(direction == CsetDirection::MinkowskiDefinition ? "cset-minkowski" : "cset-barrier", cfg);
    const BarrierCandidate cand = b ? *b : BarrierCandidate{{ScalarField::constant(h.n, -1.0)}};
    if (direction == CsetDirection::BarrierSufficient && !b) {
        out.inconclusive("the barrier direction needs a candidate");
        return std::move(out).finish();
    }
    const Context c(h, cand, cfg);
    const SetDescription& K = c.k.K;

    // C-set spot-checks.
    const Vec origin = Vec::Zero(h.n);
    if (!(K.value(origin) < 0.0)) {
        out.inconclusive_witness({origin, std::nullopt, "cset-origin", K.value(origin), 0.0}, "0 is not interior to K");
        return std::move(out).finish();
    }
    const auto ks = detail::sample_set(K, cfg.box, cfg.samples, region_seed(cfg, kTagKC, 1), cfg.workers);
    for (const auto& x : ks) {
        if (detail::depth_in_box(cfg.box, x) <= cfg.radius) {
            out.inconclusive_witness({x, std::nullopt, "cset-bounded", detail::depth_in_box(cfg.box, x), cfg.radius},
                                     "K reaches the bounding box; compactness is not supported by the samples");
            return std::move(out).finish();
        }
    }
    if (const auto mid = convexity_counterexample(K, cfg, region_seed(cfg, kTagConvex, 1))) {
        out.inconclusive_witness({*mid, std::nullopt, "cset-convexity", K.value(*mid), 0.0},
                                 "K failed the midpoint convexity spot-check");
        return std::move(out).finish();
    }
    out.flag("cset-sampled");

    if (direction == CsetDirection::MinkowskiDefinition) {
        auto pts = detail::sample_set_boundary(K, cfg.box, cfg.samples, cfg.band, region_seed(cfg, kTagBoundaryK), cfg.workers);
        std::erase_if(pts, [&](const Vec& x) { return !h.C.contains(x, cfg.band); });
        auto gauge = [&](const Vec& y) { return minkowski(K, y); };
        evaluate(pts, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
            for (const auto& eta : c.flow_in_tc(x)) {
                evs.push_back(below("minkowski-flow", x, eta, limsup_rate(gauge, x, eta, cfg.cone.h), 0.0, cfg.margin_strict));
            }
        });
        const auto jumps = jump_points(c);
        evaluate(jumps, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
            for (const auto& eta : image_samples(h.G, x, cfg.scheme)) {
                evs.push_back(below("minkowski-jump", x, eta, minkowski(K, eta), 1.0, cfg.margin_strict));
            }
        });
    } else {
        for (int i = 0; i < c.k.B.size(); ++i) {
            auto pts = m_points(c, i);
            std::erase_if(pts, [&](const Vec& x) { return !h.C.contains(x, cfg.band); });
            const ScalarField& bi = c.k.B.components[static_cast<std::size_t>(i)];
            auto value = [&](const Vec& y) { return bi.value(y); };
            evaluate(pts, cfg, out, [&](std::size_t, const Vec& x, std::vector<Evaluation>& evs) {
                for (const auto& eta : c.flow_in_tc(x)) {
                    evs.push_back(below(indexed("barrier-rate", i), x, eta, limsup_rate(value, x, eta, cfg.cone.h), 0.0, cfg.margin_strict));
                }
            });
        }
        jump_legs(c, out, true);
    }
    return std::move(out).finish();
}

}  // namespace hibarrier
