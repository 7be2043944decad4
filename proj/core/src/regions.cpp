#include "regions.hpp"

#include <algorithm>
#include <cmath>

namespace hibarrier::detail {

std::vector<Vec> chunked(int n, std::uint64_t seed, int workers, const ChunkSampler& draw) {
    if (n <= 0) return {};
    std::vector<std::vector<Vec>> parts(kChunks);
    const int per = (n + kChunks - 1) / kChunks;
    parallel_for(kChunks, workers, [&](std::size_t c) { parts[c] = draw(per, split_seed(seed, c)); });
    std::vector<Vec> out;
    for (auto& p : parts) {
        for (auto& x : p) out.push_back(std::move(x));
    }
    if (static_cast<int>(out.size()) > n) out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<Vec> sample_set(const SetDescription& s, const Box& box, int n, std::uint64_t seed, int workers) {
    return chunked(n, seed, workers, [&](int count, std::uint64_t sd) { return sample(s, box, count, sd).points; });
}

std::vector<Vec> sample_set_boundary(const SetDescription& s, const Box& box, int n, double band, std::uint64_t seed,
                                     int workers) {
    return chunked(n, seed, workers,
                   [&](int count, std::uint64_t sd) { return sample_boundary(s, box, count, band, sd).points; });
}

std::vector<Vec> sample_near(std::span<const Anchor> anchors, const SetDescription& target, int n, std::uint64_t seed,
                             int workers, const std::function<bool(const Vec&)>& accept) {
    if (anchors.empty()) return {};
    return chunked(n, seed, workers, [&](int count, std::uint64_t sd) {
        Rng rng(sd);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Vec> out;
        const int budget = 20 * count;
        for (int attempt = 0; attempt < budget && static_cast<int>(out.size()) < count; ++attempt) {
            const Anchor& a = anchors[static_cast<std::size_t>(rng() % anchors.size())];
            const int dim = static_cast<int>(a.point.size());
            const double rad = a.radius * std::pow(unit(rng), 1.0 / dim);
            const Vec y = a.point + rad * random_unit(rng, dim);
            Vec z;
            if (target.contains(y)) {
                z = y;
            } else {
                try {
                    z = project(target, y);
                } catch (const NonConvergence&) {
                    continue;
                }
            }
            if ((z - a.point).norm() <= a.radius + 1e-12 && accept(z)) out.push_back(std::move(z));
        }
        return out;
    });
}

std::vector<Anchor> with_radius(std::span<const Vec> points, double radius) {
    std::vector<Anchor> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p, radius});
    return out;
}

SetDescription boundary_of_Ke(const KComplex& k) {
    std::vector<SetDescription> parts;
    for (const auto& b : k.B.components) parts.push_back(SetDescription::intersection({k.Ke, SetDescription::leaf(b.negated())}));
    return parts.size() == 1 ? parts.front() : SetDescription::unite(parts);
}

bool robustly_in(const SetDescription& s, const Vec& x, double band) {
    for (const auto& clause : s.clauses()) {
        const bool all = std::all_of(clause.begin(), clause.end(), [&](const Leaf& l) {
            const double c = l.constraint(x);
            return l.strict ? c < -band : c <= band;
        });
        if (all) return true;
    }
    return false;
}

bool in_box(const Box& box, const Vec& x, double slack) {
    return (x.array() >= box.lo.array() - slack).all() && (x.array() <= box.hi.array() + slack).all();
}

double depth_in_box(const Box& box, const Vec& x) {
    return std::min((x - box.lo).minCoeff(), (box.hi - x).minCoeff());
}

}  // namespace hibarrier::detail
