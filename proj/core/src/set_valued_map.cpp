#include "hibarrier/set_valued_map.hpp"

#include <cmath>
#include <stdexcept>

namespace hibarrier {

SetValuedMap::SetValuedMap(int arity, int params, Base f, bool convex_images)
    : arity_(arity), params_(params), f_(std::move(f)), convex_(convex_images) {}

SetValuedMap SetValuedMap::from_exprs(const std::vector<expr::Ast>& components, int arity, int params) {
    if (static_cast<int>(components.size()) != arity) {
        throw std::invalid_argument("map has " + std::to_string(components.size()) + " components, expected " + std::to_string(arity));
    }
    return SetValuedMap(arity, params, [components](const Vec& x, const Vec& lambda) {
        Vec out(static_cast<Eigen::Index>(components.size()));
        const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
        const std::span<const double> ps(lambda.data(), static_cast<std::size_t>(lambda.size()));
        for (std::size_t i = 0; i < components.size(); ++i) out[static_cast<Eigen::Index>(i)] = expr::eval(components[i], xs, ps);
        return out;
    });
}

Vec SetValuedMap::operator()(const Vec& x, const Vec& lambda) const {
    Vec y = f_(x, lambda);
    if (!y.allFinite()) throw EvalError("non-finite map value at " + format_vec(x) + " with lambda " + format_vec(lambda), x);
    return y;
}

std::string ImageScheme::to_string() const {
    switch (kind) {
        case Kind::Vertices: return "vertices";
        case Kind::Grid: return "grid:" + std::to_string(grid);
        case Kind::Random: return "random:" + std::to_string(count);
    }
    return "?";
}

std::vector<Vec> parameter_samples(int params, const ImageScheme& scheme) {
    if (params == 0) return {Vec(0)};
    std::vector<Vec> out;
    switch (scheme.kind) {
        case ImageScheme::Kind::Vertices: {
            if (params > kMaxVertexParams) {
                throw std::length_error("vertex scheme over " + std::to_string(params) + " parameters exceeds the budget; use random");
            }
            const unsigned total = 1u << params;
            for (unsigned m = 0; m < total; ++m) {
                Vec l(params);
                for (int j = 0; j < params; ++j) l[j] = (m >> j) & 1u ? 1.0 : 0.0;
                out.push_back(l);
            }
            break;
        }
        case ImageScheme::Kind::Grid: {
            const int d = std::max(scheme.grid, 2);
            const double total = std::pow(d, params);
            if (total > 1e6) throw std::length_error("grid scheme too large");
            std::vector<int> idx(static_cast<std::size_t>(params), 0);
            for (long long c = 0; c < static_cast<long long>(total); ++c) {
                Vec l(params);
                for (int j = 0; j < params; ++j) l[j] = static_cast<double>(idx[static_cast<std::size_t>(j)]) / (d - 1);
                out.push_back(l);
                for (int j = 0; j < params; ++j) {
                    if (++idx[static_cast<std::size_t>(j)] < d) break;
                    idx[static_cast<std::size_t>(j)] = 0;
                }
            }
            break;
        }
        case ImageScheme::Kind::Random: {
            Rng rng(scheme.seed);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int i = 0; i < scheme.count; ++i) {
                Vec l(params);
                for (int j = 0; j < params; ++j) l[j] = u(rng);
                out.push_back(l);
            }
            break;
        }
    }
    return out;
}

std::vector<Vec> image_samples(const SetValuedMap& map, const Vec& x, const ImageScheme& scheme) {
    std::vector<Vec> out;
    for (const auto& l : parameter_samples(map.params(), scheme)) out.push_back(map(x, l));
    return out;
}

}  // namespace hibarrier
