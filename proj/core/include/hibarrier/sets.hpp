#pragma once

#include "hibarrier/common.hpp"
#include "hibarrier/field.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hibarrier {

enum class Membership { Inside, Boundary, Outside };
std::string to_string(Membership m);

// Constraint c(x) ≤ 0, or c(x) < 0 when strict.
struct Leaf {
    ScalarField constraint;
    bool strict = false;
};

// Conjunction of leaves; a set's disjunctive normal form is a list of clauses.
using Clause = std::vector<Leaf>;

// A subset of R^n described by a tree of sublevel leaves under intersection and union.
class SetDescription {
public:
    static SetDescription leaf(ScalarField constraint, bool strict = false);
    static SetDescription intersection(std::vector<SetDescription> children);
    static SetDescription unite(std::vector<SetDescription> children);
    static SetDescription whole(int n);
    static SetDescription empty(int n);

    int dim() const;
    bool is_leaf() const;
    bool has_union() const;
    // Intersection of leaves (or a single leaf): the shape the analytic cone tests accept.
    bool is_conjunctive() const;
    const std::vector<SetDescription>& children() const;
    const Leaf& as_leaf() const;
    const std::vector<Clause>& clauses() const;

    // Min/max composition of leaf values: ≤ 0 on the closure.
    double value(const Vec& x) const;
    Membership classify(const Vec& x, double tol) const;
    // Honours strict leaves exactly at tol = 0.
    bool contains(const Vec& x, double tol = 0.0) const;

    // Complement by De Morgan: negated leaves with strictness flipped.
    SetDescription complement() const;

    std::string describe() const;

private:
    struct Node;
    explicit SetDescription(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct HSequence {
    double h0 = 1e-2;
    double decay = 0.5;
    int count = 20;

    bool valid() const { return h0 > 0 && decay > 0 && decay < 1 && count >= 4; }
};

struct ConeQuery {
    Vec x;
    Vec v;
    double active_tol = 1e-6;
    HSequence h;
};

enum class ConeAnswer { Member, NonMember, NotApplicable };
std::string to_string(ConeAnswer a);

ConeAnswer contingent_cone_member_analytic(const SetDescription& s, const Vec& x, const Vec& v, double active_tol = 1e-6);
bool contingent_cone_member_numeric(const SetDescription& s, const ConeQuery& q, double tol);
ConeAnswer dm_cone_member(const SetDescription& s, const Vec& x, const Vec& v, double active_tol = 1e-6, double margin = 1e-8);
bool external_cone_member(const SetDescription& s, const ConeQuery& q, double tol);

struct ConeOptions {
    double active_tol = 1e-6;
    double tol = 1e-6;
    HSequence h;
};

// Analytic test when applicable, numeric otherwise.
bool contingent_cone_member(const SetDescription& s, const Vec& x, const Vec& v, const ConeOptions& opt = {});

// Keeps the directions that lie in T_S(x).
std::vector<Vec> filter_by_cone(std::span<const Vec> etas, const SetDescription& s, const Vec& x, const ConeOptions& opt = {});

struct DistanceOptions {
    int starts = 16;
    int patience = 4;  // consecutive non-improving starts before stopping
    int max_iter = 200;
    double feas_tol = 1e-9;
    std::uint64_t seed = 0x5eedULL;
};

struct Projection {
    Vec point;
    double distance = 0.0;
};

// Nearest point of the closure of s; throws NonConvergence when no feasible point is found.
Projection nearest(const SetDescription& s, const Vec& x, const DistanceOptions& opt = {});
double distance(const SetDescription& s, const Vec& x, const DistanceOptions& opt = {});
Vec project(const SetDescription& s, const Vec& x, const DistanceOptions& opt = {});

// Gauge of a C-set; throws PreconditionError when 0 is not interior.
double minkowski(const SetDescription& s, const Vec& x);

struct Transversality {
    bool feasible = false;
    Vec direction;           // unit, meaningful when feasible
    double best_max = 0.0;   // max_i <g_i, direction>
};

Transversality transversality_check(std::span<const Vec> gradients, double margin = 1e-8);

struct SampleResult {
    std::vector<Vec> points;
    int requested = 0;

    bool short_count() const { return static_cast<int>(points.size()) < requested; }
};

SampleResult sample(const SetDescription& s, const Box& box, int n, std::uint64_t seed);
SampleResult sample_boundary(const SetDescription& s, const Box& box, int n, double band, std::uint64_t seed);

// Active leaves (|c| ≤ tol) of a conjunctive set with their gradients.
struct ActiveConstraint {
    double value;
    Vec gradient;
};
std::vector<ActiveConstraint> active_constraints(const SetDescription& s, const Vec& x, double active_tol);

}  // namespace hibarrier
