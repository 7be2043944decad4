#pragma once

#include "hibarrier/common.hpp"
#include "hibarrier/expr.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hibarrier {

enum class Smoothness { C1, LocallyLipschitz };

// A scalar function on R^n with an optional analytic gradient.
class ScalarField {
public:
    using Evaluator = std::function<double(const Vec&)>;
    using Gradient = std::function<Vec(const Vec&)>;

    ScalarField(int arity, Evaluator eval, Smoothness tag = Smoothness::C1, Gradient grad = {}, std::string label = {});

    // Symbolic gradient when every partial derivative is smooth, otherwise
    // finite differences and a LocallyLipschitz tag. `tag` overrides the inferred tag.
    static ScalarField from_expr(const expr::Ast& ast, int arity, std::optional<Smoothness> tag = std::nullopt);
    static ScalarField constant(int arity, double c);
    static ScalarField affine(const Vec& a, double b);  // a·x + b
    // Pointwise max of the components; LocallyLipschitz.
    static ScalarField max_of(const std::vector<ScalarField>& parts);

    int arity() const { return arity_; }
    Smoothness smoothness() const { return tag_; }
    bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
    const std::string& label() const { return label_; }

    // Raw evaluation; may be non-finite.
    double operator()(const Vec& x) const { return eval_(x); }
    // Checked evaluation; throws EvalError on a non-finite value.
    double value(const Vec& x) const;
    std::optional<Vec> analytic_gradient(const Vec& x) const;

    ScalarField negated() const;
    ScalarField with_tag(Smoothness tag) const;

private:
    int arity_;
    Evaluator eval_;
    Smoothness tag_;
    Gradient grad_;
    std::string label_;
};

double fd_step(const Vec& x);
Vec fd_gradient(const ScalarField& f, const Vec& x);

// Analytic gradient when present, else central differences. Throws EvalError.
Vec gradient(const ScalarField& f, const Vec& x);

struct ClarkeSample {
    Vec base;
    std::vector<Vec> gradients;
    double radius = 1e-4;
    int count = 64;
    int discarded = 0;
};

ClarkeSample clarke_sample(const ScalarField& f, const Vec& x, double radius, int count, std::uint64_t seed);

// max_k <zeta_k, v> over a ClarkeSample; a sampled under-approximation.
double clarke_support(const ScalarField& f, const Vec& x, const Vec& v, double radius = 1e-4, int count = 64,
                      std::uint64_t seed = 0);
double clarke_support(const ClarkeSample& sample, const Vec& v);

}  // namespace hibarrier
