#include "hibarrier/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace hibarrier {

namespace {

struct HalfSpaces {
    Eigen::MatrixXd a;  // rows are normals
    Vec b;              // a z ≤ b
};

bool feasible(const HalfSpaces& h, const Vec& z) {
    for (Eigen::Index j = 0; j < h.a.rows(); ++j) {
        const double slack = 1e-12 * (1.0 + std::abs(h.b[j]) + h.a.row(j).norm() * z.norm());
        if (h.a.row(j).dot(z) > h.b[j] + slack) return false;
    }
    return true;
}

constexpr std::size_t kMaxActiveSets = 4096;

// Index subsets of {0..m-1} with 1..max_size elements, smallest first; empty when
// there would be more than kMaxActiveSets of them.
const std::vector<std::vector<int>>& active_sets(int m, int max_size) {
    thread_local std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
    auto [it, fresh] = cache.try_emplace({m, max_size});
    if (!fresh) return it->second;
    auto& out = it->second;
    std::vector<int> pick;
    for (int k = 1; k <= max_size; ++k) {
        pick.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = i;
        for (;;) {
            out.push_back(pick);
            if (out.size() > kMaxActiveSets) {
                out.clear();
                return out;
            }
            int i = k - 1;
            while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - k + i) --i;
            if (i < 0) break;
            ++pick[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

struct PolyProjection {
    Vec point;
    Vec multipliers;  // x - point = aᵀ multipliers, zero off the active set
};

// Projection of x onto a polyhedron. Exact for few constraints: the minimizer is
// the feasible affine-subspace projection of least distance.
std::optional<PolyProjection> project_polyhedron(const HalfSpaces& h, const Vec& x) {
    const Eigen::Index m = h.a.rows();
    if (m == 0 || feasible(h, x)) return PolyProjection{x, Vec::Zero(m)};
    const Eigen::Index n = x.size();
    const auto& subsets = active_sets(static_cast<int>(m), static_cast<int>(std::min(m, n)));
    if (!subsets.empty()) {
        // A feasible candidate with nonnegative multipliers satisfies KKT and is
        // the unique minimizer; at most n independent constraints are ever needed.
        std::optional<PolyProjection> best;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& idx : subsets) {
            const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXd as(k, n);
            Vec bs(k);
            for (Eigen::Index r = 0; r < k; ++r) {
                as.row(r) = h.a.row(idx[static_cast<std::size_t>(r)]);
                bs[r] = h.b[idx[static_cast<std::size_t>(r)]];
            }
            const Eigen::MatrixXd gram = as * as.transpose();
            Vec w;
            if (k == 1) {
                if (!(gram(0, 0) > 0.0)) continue;
                w = (as * x - bs) / gram(0, 0);
            } else {
                w = gram.completeOrthogonalDecomposition().solve(as * x - bs);
            }
            const Vec z = x - as.transpose() * w;
            if (!z.allFinite()) continue;
            // Inconsistent equality systems leave a residual.
            if ((as * z - bs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + bs.cwiseAbs().maxCoeff())) continue;
            const double d = (z - x).norm();
            if (d >= best_d || !feasible(h, z)) continue;
            best_d = d;
            Vec mult = Vec::Zero(m);
            for (Eigen::Index r = 0; r < k; ++r) mult[idx[static_cast<std::size_t>(r)]] = std::max(w[r], 0.0);
            best = PolyProjection{z, mult};
            if (w.minCoeff() >= -1e-12 * (1.0 + w.cwiseAbs().maxCoeff())) break;
        }
        return best;
    }
    // Dykstra's alternating projections for larger systems; no multipliers.
    Vec z = x;
    std::vector<Vec> inc(static_cast<std::size_t>(m), Vec::Zero(x.size()));
    for (int it = 0; it < 20000; ++it) {
        const Vec before = z;
        for (Eigen::Index j = 0; j < m; ++j) {
            const Vec y = z + inc[static_cast<std::size_t>(j)];
            const Vec aj = h.a.row(j).transpose();
            const double excess = aj.dot(y) - h.b[j];
            const Vec p = excess > 0 ? Vec(y - excess / aj.squaredNorm() * aj) : y;
            inc[static_cast<std::size_t>(j)] = y - p;
            z = p;
        }
        if ((z - before).norm() < 1e-15 * (1.0 + z.norm())) break;
    }
    if (!feasible(h, z)) return std::nullopt;
    return PolyProjection{z, Vec::Zero(m)};
}

Eigen::MatrixXd hessian(const ScalarField& f, const Vec& y) {
    const Eigen::Index n = y.size();
    Eigen::MatrixXd hm(n, n);
    const double h = 1e-5 * (1.0 + y.norm());
    Vec e = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        e[i] = h;
        hm.col(i) = (gradient(f, y + e) - gradient(f, y - e)) / (2.0 * h);
        e[i] = 0.0;
    }
    return 0.5 * (hm + hm.transpose());
}

// Sequential quadratic programming for min |z - x|^2 over the clause: each step
// solves the linearized problem in the metric of the Lagrangian Hessian.
std::optional<Vec> project_clause_from(const Clause& clause, const Vec& x, Vec y, const DistanceOptions& opt) {
    const Eigen::Index n = x.size();
    const std::size_t m = clause.size();
    Vec mu = Vec::Zero(static_cast<Eigen::Index>(m));
    for (int it = 0; it < opt.max_iter; ++it) {
        Eigen::MatrixXd lower = Eigen::MatrixXd::Identity(n, n);
        if (m > 0 && mu.maxCoeff() > 0.0) {
            Eigen::MatrixXd hm = Eigen::MatrixXd::Identity(n, n);
            for (std::size_t j = 0; j < m; ++j) {
                if (mu[static_cast<Eigen::Index>(j)] > 0.0) hm += mu[static_cast<Eigen::Index>(j)] * hessian(clause[j].constraint, y);
            }
            // Keep the metric positive definite; nonconvex leaves can make it indefinite.
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hm);
            const double low = eig.eigenvalues().minCoeff();
            if (!(low >= 0.1)) hm += (0.1 - (std::isfinite(low) ? low : -1.0)) * Eigen::MatrixXd::Identity(n, n);
            lower = Eigen::LLT<Eigen::MatrixXd>(hm).matrixL();
        }

        // With H = L Lᵀ and u = Lᵀ p, the step p minimizes |u + L⁻¹(y - x)|².
        HalfSpaces h;
        h.a.resize(static_cast<Eigen::Index>(m), n);
        h.b.resize(static_cast<Eigen::Index>(m));
        std::vector<std::size_t> rows_of;
        for (std::size_t j = 0; j < m; ++j) {
            const double c = clause[j].constraint(y);
            if (!std::isfinite(c)) return std::nullopt;
            const Vec g = gradient(clause[j].constraint, y);
            if (g.norm() == 0.0) {
                if (c > 0.0) return std::nullopt;
                continue;
            }
            const Eigen::Index r = static_cast<Eigen::Index>(rows_of.size());
            h.a.row(r) = lower.triangularView<Eigen::Lower>().solve(g).transpose();
            h.b[r] = -c;
            rows_of.push_back(j);
        }
        h.a.conservativeResize(static_cast<Eigen::Index>(rows_of.size()), n);
        h.b.conservativeResize(static_cast<Eigen::Index>(rows_of.size()));
        const Vec target = -lower.triangularView<Eigen::Lower>().solve(Vec(y - x));
        auto u = project_polyhedron(h, target);
        if (!u) return std::nullopt;
        const Vec p = lower.transpose().triangularView<Eigen::Upper>().solve(u->point);
        mu.setZero();
        for (std::size_t r = 0; r < rows_of.size(); ++r) mu[static_cast<Eigen::Index>(rows_of[r])] = u->multipliers[static_cast<Eigen::Index>(r)];
        y += p;
        if (!y.allFinite()) return std::nullopt;
        if (p.norm() <= 1e-13 * (1.0 + y.norm())) break;
    }
    for (const auto& leaf : clause) {
        const double c = leaf.constraint(y);
        if (!(c <= opt.feas_tol)) return std::nullopt;
    }
    return y;
}

bool clause_contains(const Clause& clause, const Vec& x) {
    return std::all_of(clause.begin(), clause.end(), [&](const Leaf& l) { return l.constraint(x) <= 0.0; });
}

std::optional<Projection> project_clause(const Clause& clause, const Vec& x, const DistanceOptions& opt) {
    if (clause_contains(clause, x)) return Projection{x, 0.0};
    std::optional<Projection> best;
    auto consider = [&](const std::optional<Vec>& y) {
        if (!y) return;
        const double d = (*y - x).norm();
        if (!best || d < best->distance) best = Projection{*y, d};
    };
    consider(project_clause_from(clause, x, x, opt));
    Rng rng(opt.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = static_cast<int>(x.size());
    // Stop once several perturbed starts in a row fail to improve.
    int stale = 0;
    for (int s = 1; s < opt.starts && stale < opt.patience; ++s) {
        const double scale = best ? std::max(best->distance, 1e-3) * (0.5 + u(rng)) : std::pow(10.0, -2.0 + 3.0 * u(rng));
        const double before = best ? best->distance : std::numeric_limits<double>::infinity();
        consider(project_clause_from(clause, x, x + scale * random_unit(rng, n), opt));
        const double after = best ? best->distance : std::numeric_limits<double>::infinity();
        stale = after < before - 1e-12 * (1.0 + after) ? 0 : stale + 1;
    }
    return best;
}

}  // namespace

Projection nearest(const SetDescription& s, const Vec& x, const DistanceOptions& opt) {
    for (const auto& clause : s.clauses()) {
        if (clause_contains(clause, x)) return Projection{x, 0.0};
    }
    std::optional<Projection> best;
    for (const auto& clause : s.clauses()) {
        auto p = project_clause(clause, x, opt);
        if (p && (!best || p->distance < best->distance)) best = p;
        if (best && best->distance == 0.0) break;
    }
    if (!best) throw NonConvergence("no feasible point found while projecting " + format_vec(x) + " onto " + s.describe());
    return *best;
}

double distance(const SetDescription& s, const Vec& x, const DistanceOptions& opt) { return nearest(s, x, opt).distance; }

Vec project(const SetDescription& s, const Vec& x, const DistanceOptions& opt) { return nearest(s, x, opt).point; }

}  // namespace hibarrier
