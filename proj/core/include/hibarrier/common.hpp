#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hibarrier {

using Vec = Eigen::VectorXd;
using Rng = std::mt19937_64;

// Thrown when a field or map produces a non-finite value; carries the point.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, Vec at) : std::runtime_error(what), point(std::move(at)) {}
    Vec point;
};

// Thrown when an iterative geometric solver gives up.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Derive an independent seed for substream `index` of `seed` (splitmix64 finalizer).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index);

// Uniform point on the unit sphere in R^n.
Vec random_unit(Rng& rng, int n);

struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }
    Vec uniform(Rng& rng) const;
    double radius() const;  // max |x| over the box corners
};

std::string format_vec(const Vec& v);

// Minimum-norm point of conv{points}.
Vec min_norm_point(std::span<const Vec> points);

// Runs body(i) for i in [0, count) on up to `workers` threads. Results must be
// written to per-index slots by the caller, which keeps merges deterministic.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace hibarrier
