#include "hibarrier/field.hpp"

#include <cmath>
#include <memory>

namespace hibarrier {

ScalarField::ScalarField(int arity, Evaluator eval, Smoothness tag, Gradient grad, std::string label)
    : arity_(arity), eval_(std::move(eval)), tag_(tag), grad_(std::move(grad)), label_(std::move(label)) {}

ScalarField ScalarField::from_expr(const expr::Ast& ast, int arity, std::optional<Smoothness> tag) {
    std::vector<expr::Ast> partials;
    bool smooth = true;
    for (int i = 1; i <= arity && smooth; ++i) {
        auto d = expr::diff(ast, i);
        if (auto* a = std::get_if<expr::Ast>(&d)) {
            partials.push_back(*a);
        } else {
            smooth = false;
        }
    }
    Evaluator e = [ast](const Vec& x) { return expr::eval(ast, {x.data(), static_cast<std::size_t>(x.size())}); };
    Gradient g;
    if (smooth) {
        g = [partials](const Vec& x) {
            Vec out(static_cast<Eigen::Index>(partials.size()));
            for (std::size_t i = 0; i < partials.size(); ++i) {
                out[static_cast<Eigen::Index>(i)] = expr::eval(partials[i], {x.data(), static_cast<std::size_t>(x.size())});
            }
            return out;
        };
    }
    const Smoothness t = tag.value_or(smooth ? Smoothness::C1 : Smoothness::LocallyLipschitz);
    return ScalarField(arity, std::move(e), t, std::move(g), expr::to_string(ast));
}

ScalarField ScalarField::constant(int arity, double c) {
    return ScalarField(
        arity, [c](const Vec&) { return c; }, Smoothness::C1, [arity](const Vec&) { return Vec::Zero(arity).eval(); },
        std::to_string(c));
}

ScalarField ScalarField::affine(const Vec& a, double b) {
    return ScalarField(
        static_cast<int>(a.size()), [a, b](const Vec& x) { return a.dot(x) + b; }, Smoothness::C1, [a](const Vec&) { return a; },
        "affine");
}

ScalarField ScalarField::max_of(const std::vector<ScalarField>& parts) {
    if (parts.size() == 1) return parts.front();
    auto shared = std::make_shared<const std::vector<ScalarField>>(parts);
    std::string label = "max(";
    for (std::size_t i = 0; i < parts.size(); ++i) label += (i ? ", " : "") + parts[i].label();
    label += ")";
    return ScalarField(
        parts.front().arity(),
        [shared](const Vec& x) {
            double m = -std::numeric_limits<double>::infinity();
            for (const auto& f : *shared) m = std::max(m, f(x));
            return m;
        },
        Smoothness::LocallyLipschitz,
        // Gradient of the maximizing component: the field's gradient almost everywhere.
        [shared](const Vec& x) {
            std::size_t arg = 0;
            for (std::size_t i = 1; i < shared->size(); ++i) {
                if ((*shared)[i](x) > (*shared)[arg](x)) arg = i;
            }
            return gradient((*shared)[arg], x);
        },
        label);
}

double ScalarField::value(const Vec& x) const {
    const double v = eval_(x);
    if (!std::isfinite(v)) throw EvalError("non-finite value of " + label_ + " at " + format_vec(x), x);
    return v;
}

std::optional<Vec> ScalarField::analytic_gradient(const Vec& x) const {
    if (!grad_) return std::nullopt;
    return grad_(x);
}

ScalarField ScalarField::negated() const {
    Evaluator e = [f = eval_](const Vec& x) { return -f(x); };
    Gradient g;
    if (grad_) g = [gr = grad_](const Vec& x) { return Vec(-gr(x)); };
    return ScalarField(arity_, std::move(e), tag_, std::move(g), "-(" + label_ + ")");
}

ScalarField ScalarField::with_tag(Smoothness tag) const {
    ScalarField out = *this;
    out.tag_ = tag;
    return out;
}

double fd_step(const Vec& x) { return 1e-6 * (1.0 + x.norm()); }

Vec fd_gradient(const ScalarField& f, const Vec& x) {
    const double h = fd_step(x);
    Vec g(x.size());
    Vec y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        const double up = f(y);
        y[i] = x[i] - h;
        const double down = f(y);
        y[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

Vec gradient(const ScalarField& f, const Vec& x) {
    Vec g = f.has_analytic_gradient() ? *f.analytic_gradient(x) : fd_gradient(f, x);
    if (!g.allFinite()) throw EvalError("non-finite gradient of " + f.label() + " at " + format_vec(x), x);
    return g;
}

ClarkeSample clarke_sample(const ScalarField& f, const Vec& x, double radius, int count, std::uint64_t seed) {
    ClarkeSample s;
    s.base = x;
    s.radius = radius;
    s.count = count;
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = static_cast<int>(x.size());
    const int budget = 4 * count;
    for (int attempt = 0; attempt < budget && static_cast<int>(s.gradients.size()) < count; ++attempt) {
        // Uniform in the ball of the given radius.
        const Vec dir = random_unit(rng, n);
        const double r = radius * std::pow(u(rng), 1.0 / n);
        const Vec y = x + r * dir;
        const Vec g = f.has_analytic_gradient() ? *f.analytic_gradient(y) : fd_gradient(f, y);
        if (g.allFinite()) {
            s.gradients.push_back(g);
        } else {
            ++s.discarded;
        }
    }
    if (s.gradients.empty()) throw EvalError("no finite gradient samples of " + f.label() + " near " + format_vec(x), x);
    return s;
}

double clarke_support(const ClarkeSample& sample, const Vec& v) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& g : sample.gradients) best = std::max(best, g.dot(v));
    return best;
}

double clarke_support(const ScalarField& f, const Vec& x, const Vec& v, double radius, int count, std::uint64_t seed) {
    return clarke_support(clarke_sample(f, x, radius, count, seed), v);
}

}  // namespace hibarrier
