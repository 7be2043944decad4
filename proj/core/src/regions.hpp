#pragma once

// Samplers for the regions the certificate checkers quantify over.

#include "hibarrier/model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hibarrier::detail {

// Work is split into a fixed number of chunks with their own seeds so the
// result does not depend on the worker count.
constexpr int kChunks = 8;

using ChunkSampler = std::function<std::vector<Vec>(int count, std::uint64_t seed)>;
std::vector<Vec> chunked(int n, std::uint64_t seed, int workers, const ChunkSampler& draw);

std::vector<Vec> sample_set(const SetDescription& s, const Box& box, int n, std::uint64_t seed, int workers);
std::vector<Vec> sample_set_boundary(const SetDescription& s, const Box& box, int n, double band, std::uint64_t seed,
                                     int workers);

struct Anchor {
    Vec point;
    double radius = 0.0;
};

// Points of `target` within each anchor's radius, reached by projecting uniform
// ball samples; `accept` filters the projected points.
std::vector<Vec> sample_near(std::span<const Anchor> anchors, const SetDescription& target, int n, std::uint64_t seed,
                             int workers, const std::function<bool(const Vec&)>& accept);

std::vector<Anchor> with_radius(std::span<const Vec> points, double radius);

// ∂K_e as the union over i of K_e ∩ {B_i ≥ 0}.
SetDescription boundary_of_Ke(const KComplex& k);

// Strict leaves must hold with room `band`, non-strict ones within `band`.
bool robustly_in(const SetDescription& s, const Vec& x, double band);

bool in_box(const Box& box, const Vec& x, double slack);

// Distance from x to the faces of the box (negative when outside).
double depth_in_box(const Box& box, const Vec& x);

}  // namespace hibarrier::detail
