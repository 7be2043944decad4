#include "hibarrier/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

namespace hibarrier {

struct SetDescription::Node {
    struct Intersection {
        std::vector<SetDescription> children;
    };
    struct Union {
        std::vector<SetDescription> children;
    };
    int dim = 0;
    std::variant<Intersection, Union, Leaf> kind;
    std::vector<Clause> clauses;
};

namespace {

constexpr std::size_t kMaxClauses = 4096;

std::vector<Clause> product(const std::vector<Clause>& a, const std::vector<Clause>& b) {
    std::vector<Clause> out;
    out.reserve(a.size() * b.size());
    for (const auto& ca : a) {
        for (const auto& cb : b) {
            Clause c = ca;
            c.insert(c.end(), cb.begin(), cb.end());
            out.push_back(std::move(c));
        }
    }
    if (out.size() > kMaxClauses) throw std::length_error("set description expands to too many clauses");
    return out;
}

int common_dim(const std::vector<SetDescription>& children) {
    if (children.empty()) throw std::invalid_argument("set composition needs at least one child");
    const int n = children.front().dim();
    for (const auto& c : children) {
        if (c.dim() != n) throw std::invalid_argument("set composition with mismatched dimensions");
    }
    return n;
}

double leaf_value(const Leaf& l, const Vec& x) { return l.constraint.value(x); }

}  // namespace

std::string to_string(Membership m) {
    switch (m) {
        case Membership::Inside: return "Inside";
        case Membership::Boundary: return "Boundary";
        case Membership::Outside: return "Outside";
    }
    return "?";
}

std::string to_string(ConeAnswer a) {
    switch (a) {
        case ConeAnswer::Member: return "Member";
        case ConeAnswer::NonMember: return "NonMember";
        case ConeAnswer::NotApplicable: return "NotApplicable";
    }
    return "?";
}

SetDescription SetDescription::leaf(ScalarField constraint, bool strict) {
    auto n = std::make_shared<Node>();
    n->dim = constraint.arity();
    Leaf l{std::move(constraint), strict};
    n->clauses = {Clause{l}};
    n->kind = std::move(l);
    return SetDescription(std::move(n));
}

SetDescription SetDescription::intersection(std::vector<SetDescription> children) {
    auto n = std::make_shared<Node>();
    n->dim = common_dim(children);
    n->clauses = children.front().clauses();
    for (std::size_t i = 1; i < children.size(); ++i) n->clauses = product(n->clauses, children[i].clauses());
    n->kind = Node::Intersection{std::move(children)};
    return SetDescription(std::move(n));
}

SetDescription SetDescription::unite(std::vector<SetDescription> children) {
    auto n = std::make_shared<Node>();
    n->dim = common_dim(children);
    for (const auto& c : children) n->clauses.insert(n->clauses.end(), c.clauses().begin(), c.clauses().end());
    if (n->clauses.size() > kMaxClauses) throw std::length_error("set description expands to too many clauses");
    n->kind = Node::Union{std::move(children)};
    return SetDescription(std::move(n));
}

SetDescription SetDescription::whole(int n) { return leaf(ScalarField::constant(n, -1.0)); }
SetDescription SetDescription::empty(int n) { return leaf(ScalarField::constant(n, 1.0)); }

int SetDescription::dim() const { return node_->dim; }
bool SetDescription::is_leaf() const { return std::holds_alternative<Leaf>(node_->kind); }

bool SetDescription::has_union() const {
    if (std::holds_alternative<Node::Union>(node_->kind)) return true;
    if (const auto* i = std::get_if<Node::Intersection>(&node_->kind)) {
        return std::any_of(i->children.begin(), i->children.end(), [](const auto& c) { return c.has_union(); });
    }
    return false;
}

bool SetDescription::is_conjunctive() const { return node_->clauses.size() == 1 && !has_union(); }

const std::vector<SetDescription>& SetDescription::children() const {
    static const std::vector<SetDescription> none;
    if (const auto* i = std::get_if<Node::Intersection>(&node_->kind)) return i->children;
    if (const auto* u = std::get_if<Node::Union>(&node_->kind)) return u->children;
    return none;
}

const Leaf& SetDescription::as_leaf() const { return std::get<Leaf>(node_->kind); }
const std::vector<Clause>& SetDescription::clauses() const { return node_->clauses; }

double SetDescription::value(const Vec& x) const {
    if (const auto* l = std::get_if<Leaf>(&node_->kind)) return leaf_value(*l, x);
    if (const auto* i = std::get_if<Node::Intersection>(&node_->kind)) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& c : i->children) m = std::max(m, c.value(x));
        return m;
    }
    const auto& u = std::get<Node::Union>(node_->kind);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : u.children) m = std::min(m, c.value(x));
    return m;
}

Membership SetDescription::classify(const Vec& x, double tol) const {
    const double v = value(x);
    if (v < -tol) return Membership::Inside;
    if (v <= tol) return Membership::Boundary;
    return Membership::Outside;
}

bool SetDescription::contains(const Vec& x, double tol) const {
    if (const auto* l = std::get_if<Leaf>(&node_->kind)) {
        const double c = leaf_value(*l, x);
        return l->strict ? c < tol : c <= tol;
    }
    if (const auto* i = std::get_if<Node::Intersection>(&node_->kind)) {
        return std::all_of(i->children.begin(), i->children.end(), [&](const auto& c) { return c.contains(x, tol); });
    }
    const auto& u = std::get<Node::Union>(node_->kind);
    return std::any_of(u.children.begin(), u.children.end(), [&](const auto& c) { return c.contains(x, tol); });
}

SetDescription SetDescription::complement() const {
    if (const auto* l = std::get_if<Leaf>(&node_->kind)) return leaf(l->constraint.negated(), !l->strict);
    std::vector<SetDescription> parts;
    for (const auto& c : children()) parts.push_back(c.complement());
    if (std::holds_alternative<Node::Intersection>(node_->kind)) return unite(std::move(parts));
    return intersection(std::move(parts));
}

std::string SetDescription::describe() const {
    if (const auto* l = std::get_if<Leaf>(&node_->kind)) return l->constraint.label() + (l->strict ? " < 0" : " <= 0");
    const bool inter = std::holds_alternative<Node::Intersection>(node_->kind);
    std::string s = "(";
    const auto& ch = children();
    for (std::size_t i = 0; i < ch.size(); ++i) s += (i ? (inter ? " and " : " or ") : "") + ch[i].describe();
    return s + ")";
}

// ---------------------------------------------------------------- cones

std::vector<ActiveConstraint> active_constraints(const SetDescription& s, const Vec& x, double active_tol) {
    std::vector<ActiveConstraint> out;
    for (const auto& l : s.clauses().front()) {
        const double c = l.constraint.value(x);
        if (std::abs(c) <= active_tol) out.push_back({c, gradient(l.constraint, x)});
    }
    return out;
}

namespace {

bool nonpositive(double dot, const Vec& g, const Vec& v) { return dot <= 1e-12 * (1.0 + g.norm() * v.norm()); }

}  // namespace

ConeAnswer contingent_cone_member_analytic(const SetDescription& s, const Vec& x, const Vec& v, double active_tol) {
    if (!s.is_conjunctive()) return ConeAnswer::NotApplicable;
    if (s.value(x) > active_tol) return ConeAnswer::NotApplicable;
    const auto active = active_constraints(s, x, active_tol);
    if (active.empty()) return ConeAnswer::Member;
    std::vector<Vec> grads;
    for (const auto& a : active) grads.push_back(a.gradient);
    if (!transversality_check(grads).feasible) return ConeAnswer::NotApplicable;
    for (const auto& a : active) {
        if (!nonpositive(a.gradient.dot(v), a.gradient, v)) return ConeAnswer::NonMember;
    }
    return ConeAnswer::Member;
}

ConeAnswer dm_cone_member(const SetDescription& s, const Vec& x, const Vec& v, double active_tol, double margin) {
    if (!s.is_conjunctive()) return ConeAnswer::NotApplicable;
    if (s.value(x) > active_tol) return ConeAnswer::NotApplicable;
    for (const auto& a : active_constraints(s, x, active_tol)) {
        if (!(a.gradient.dot(v) < -margin)) return ConeAnswer::NonMember;
    }
    return ConeAnswer::Member;
}

bool contingent_cone_member_numeric(const SetDescription& s, const ConeQuery& q, double tol) {
    if (q.v.norm() == 0.0) return true;
    Vec base = q.x;
    if (s.value(base) > 0.0) base = project(s, base);
    double h = q.h.h0;
    for (int k = 0; k < q.h.count; ++k, h *= q.h.decay) {
        const Vec y = base + h * q.v;
        if (s.value(y) <= 0.0) return true;
        if (distance(s, y) / h <= tol) return true;
    }
    return false;
}

bool external_cone_member(const SetDescription& s, const ConeQuery& q, double tol) {
    if (q.v.norm() == 0.0) return true;
    const double d0 = s.value(q.x) <= 0.0 ? 0.0 : distance(s, q.x);
    double h = q.h.h0;
    for (int k = 0; k < q.h.count; ++k, h *= q.h.decay) {
        const Vec y = q.x + h * q.v;
        const double d = s.value(y) <= 0.0 ? 0.0 : distance(s, y);
        if ((d - d0) / h <= tol) return true;
    }
    return false;
}

bool contingent_cone_member(const SetDescription& s, const Vec& x, const Vec& v, const ConeOptions& opt) {
    const ConeAnswer a = contingent_cone_member_analytic(s, x, v, opt.active_tol);
    if (a != ConeAnswer::NotApplicable) return a == ConeAnswer::Member;
    return contingent_cone_member_numeric(s, ConeQuery{x, v, opt.active_tol, opt.h}, opt.tol);
}

std::vector<Vec> filter_by_cone(std::span<const Vec> etas, const SetDescription& s, const Vec& x, const ConeOptions& opt) {
    if (s.classify(x, opt.active_tol) == Membership::Inside) return {etas.begin(), etas.end()};
    std::vector<Vec> out;
    for (const auto& eta : etas) {
        if (contingent_cone_member(s, x, eta, opt)) out.push_back(eta);
    }
    return out;
}

// ---------------------------------------------------------------- gauge

double minkowski(const SetDescription& s, const Vec& x) {
    const Vec origin = Vec::Zero(s.dim());
    if (!(s.value(origin) < 0.0)) throw PreconditionError("minkowski: origin is not interior to the set");
    if (x.norm() == 0.0) return 0.0;
    auto inside = [&](double mu) { return s.value(x / mu) <= 0.0; };
    double hi = 1.0;
    while (!inside(hi)) {
        hi *= 2.0;
        if (hi > 1e300) throw PreconditionError("minkowski: set appears unbounded along the ray");
    }
    double lo = 0.0;
    // Shrink hi so the bracket stays tight when x is deep inside.
    while (inside(hi / 2.0) && hi > 1e-300) hi /= 2.0;
    lo = hi / 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? hi : lo) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------- transversality

// Enumerates affine hulls of subsets for small lists, Frank-Wolfe otherwise.
Vec min_norm_point(std::span<const Vec> g) {
    const std::size_t m = g.size();
    const Eigen::Index n = g.front().size();
    Vec best = g.front();
    if (m <= 10) {
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            std::vector<std::size_t> idx;
            for (std::size_t i = 0; i < m; ++i) {
                if (mask & (1u << i)) idx.push_back(i);
            }
            const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
            // Minimize |G w|^2 subject to sum w = 1 via the KKT system.
            Eigen::MatrixXd G(n, k);
            for (Eigen::Index j = 0; j < k; ++j) G.col(j) = g[idx[static_cast<std::size_t>(j)]];
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
            kkt.topLeftCorner(k, k) = G.transpose() * G;
            kkt.block(0, k, k, 1).setOnes();
            kkt.block(k, 0, 1, k).setOnes();
            Vec rhs = Vec::Zero(k + 1);
            rhs[k] = 1.0;
            const Vec sol = kkt.completeOrthogonalDecomposition().solve(rhs);
            const Vec w = sol.head(k);
            if (!w.allFinite() || w.minCoeff() < -1e-12 || std::abs(w.sum() - 1.0) > 1e-9) continue;
            const Vec p = G * w;
            if (p.norm() < best.norm()) best = p;
        }
        return best;
    }
    Vec p = g.front();
    for (int it = 0; it < 2000; ++it) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < m; ++i) {
            if (g[i].dot(p) < g[arg].dot(p)) arg = i;
        }
        const Vec d = g[arg] - p;
        const double dd = d.squaredNorm();
        if (dd == 0.0) break;
        const double t = std::clamp(-p.dot(d) / dd, 0.0, 1.0);
        if (t == 0.0) break;
        p += t * d;
    }
    return p;
}

Transversality transversality_check(std::span<const Vec> gradients, double margin) {
    Transversality t;
    if (gradients.empty()) throw std::invalid_argument("transversality_check: empty gradient list");
    for (const auto& g : gradients) {
        if (g.norm() == 0.0) return t;
    }
    const Vec p = min_norm_point(gradients);
    if (p.norm() == 0.0) return t;
    t.direction = -p / p.norm();
    t.best_max = -std::numeric_limits<double>::infinity();
    for (const auto& g : gradients) t.best_max = std::max(t.best_max, g.dot(t.direction));
    t.feasible = t.best_max < -margin;
    return t;
}

// ---------------------------------------------------------------- sampling

SampleResult sample(const SetDescription& s, const Box& box, int n, std::uint64_t seed) {
    SampleResult r;
    r.requested = n;
    Rng rng(seed);
    const int budget = 20 * n;
    for (int attempt = 0; attempt < budget && static_cast<int>(r.points.size()) < n; ++attempt) {
        const Vec y = box.uniform(rng);
        if (s.contains(y)) {
            r.points.push_back(y);
            continue;
        }
        // Lower-dimensional or thin sets are reached by projection.
        try {
            const Vec z = project(s, y);
            if (s.value(z) <= 1e-9 && (z.array() >= box.lo.array() - 1e-12).all() && (z.array() <= box.hi.array() + 1e-12).all()) {
                r.points.push_back(z);
            }
        } catch (const NonConvergence&) {
            // Keep trying; an empty set ends with a short count.
        }
    }
    return r;
}

SampleResult sample_boundary(const SetDescription& s, const Box& box, int n, double band, std::uint64_t seed) {
    SampleResult r;
    r.requested = n;
    Rng rng(seed);
    const SetDescription outside = s.complement();
    const int budget = 20 * n;
    for (int attempt = 0; attempt < budget && static_cast<int>(r.points.size()) < n; ++attempt) {
        const Vec y = box.uniform(rng);
        try {
            const Vec z = s.value(y) <= 0.0 ? project(outside, y) : project(s, y);
            const bool in_box = (z.array() >= box.lo.array() - band).all() && (z.array() <= box.hi.array() + band).all();
            if (in_box && s.classify(z, band) == Membership::Boundary) r.points.push_back(z);
        } catch (const NonConvergence&) {
        }
    }
    return r;
}

}  // namespace hibarrier
