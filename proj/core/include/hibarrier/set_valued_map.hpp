#pragma once

#include "hibarrier/common.hpp"
#include "hibarrier/expr.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hibarrier {

// x ↦ { f(x, λ) : λ ∈ [0,1]^k }.
class SetValuedMap {
public:
    using Base = std::function<Vec(const Vec& x, const Vec& lambda)>;

    SetValuedMap(int arity, int params, Base f, bool convex_images = true);
    // One expression per output component; parameters p1..pk are the λ coordinates.
    static SetValuedMap from_exprs(const std::vector<expr::Ast>& components, int arity, int params);

    int arity() const { return arity_; }
    int params() const { return params_; }
    bool convex_images() const { return convex_; }

    // Throws EvalError on a non-finite component.
    Vec operator()(const Vec& x, const Vec& lambda) const;

private:
    int arity_;
    int params_;
    Base f_;
    bool convex_;
};

struct ImageScheme {
    enum class Kind { Vertices, Grid, Random };
    Kind kind = Kind::Vertices;
    int grid = 3;
    int count = 16;
    std::uint64_t seed = 0;

    static ImageScheme vertices() { return {}; }
    static ImageScheme lattice(int d) { return {Kind::Grid, d, 0, 0}; }
    static ImageScheme random(int n, std::uint64_t seed) { return {Kind::Random, 0, n, seed}; }
    std::string to_string() const;
};

constexpr int kMaxVertexParams = 12;

// Parameter points λ for a scheme; throws std::length_error when vertices exceed the budget.
std::vector<Vec> parameter_samples(int params, const ImageScheme& scheme);

std::vector<Vec> image_samples(const SetValuedMap& map, const Vec& x, const ImageScheme& scheme);

}  // namespace hibarrier
