#pragma once

#include "hibarrier/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hibarrier {

struct CheckConfig {
    double radius = 0.1;          // size of the neighborhoods U(·)
    double band = 1e-3;           // boundary band δ
    int samples = 200;            // per region
    ImageScheme scheme = ImageScheme::vertices();
    double tol_eq = 1e-8;         // slack for ≤ conditions
    double margin_strict = 1e-6;  // required room for < conditions
    std::uint64_t seed = 1;
    Box box;
    int workers = 1;
    ConeOptions cone;
    double clarke_radius = 1e-4;
    int clarke_samples = 64;
    // Pair band samples with random boundary points instead of their projection.
    bool full_pair_sampling = false;
    // sup |F| over K∩C below this counts as a bounded flow map.
    double flow_bound = 1e6;
    int max_witnesses = 8;  // per condition

    // Throws std::invalid_argument.
    void validate(int n) const;
};

class UniquenessFunction {
public:
    enum class Kind { Linear, Osgood, Custom };

    static UniquenessFunction linear(double k);
    static UniquenessFunction osgood();
    static UniquenessFunction custom(ScalarField rho);
    // "linear:k" or "osgood"; throws std::invalid_argument.
    static UniquenessFunction parse(const std::string& text);

    Kind kind() const { return kind_; }
    double operator()(double w) const;
    std::string to_string() const;

private:
    UniquenessFunction(Kind kind, double k, std::optional<ScalarField> f) : kind_(kind), k_(k), f_(std::move(f)) {}
    Kind kind_;
    double k_;
    std::optional<ScalarField> f_;
};

enum class CheckStatus { NoViolationFound, Violated, Inconclusive };
std::string to_string(CheckStatus s);

// One evaluated instance of a condition: it holds when value ≤ bound + tol_eq,
// or value < bound - margin_strict for strict conditions.
struct Evaluation {
    std::string condition;
    Vec x;
    std::optional<Vec> eta;
    double value = 0.0;
    double bound = 0.0;
    bool violated = false;

    double margin() const { return value - bound; }
};

struct Witness {
    Vec x;
    std::optional<Vec> eta;
    std::string condition;
    double value = 0.0;
    double bound = 0.0;
};

struct ConditionSummary {
    int evaluations = 0;
    int violations = 0;
    double worst_margin = 0.0;
};

// NoViolationFound is relative to the samples drawn; it is never a proof.
struct Verdict {
    std::string check;
    CheckStatus status = CheckStatus::NoViolationFound;
    std::vector<Witness> witnesses;
    int samples = 0;
    double worst_margin = 0.0;
    bool vacuous = false;
    std::vector<std::string> flags;
    std::vector<std::string> notes;
    std::map<std::string, ConditionSummary> conditions;
    std::vector<Evaluation> evaluations;
    CheckConfig config;

    bool has_flag(const std::string& f) const;
    std::vector<const Evaluation*> evaluations_of(const std::string& condition) const;
};

enum class BoundaryOption { A, B, C };
enum class CompletionMode { NontrivialFlow, NeighborhoodFlow };
enum class CsetDirection { MinkowskiDefinition, BarrierSufficient };

// Forward pre-invariance with C1 components: flow condition on the outside bands, jump conditions on D∩K.
Verdict check_thm1(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg);
// Flow condition only on M_i∩C under transversality, a Lipschitz-like estimate on F, and one of three
// extra conditions near ∂K_e ∩ ∂C.
Verdict check_thm_boundary(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg,
                           const UniquenessFunction& rho, BoundaryOption option);
// Flow directions must lie in the external contingent cone of K on the outside band.
Verdict check_thm_external(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg);
// Clarke support of the scalar candidate (max_i B_i when m > 1) on the outside band.
Verdict check_thm_lipschitz(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg);
// As check_thm1 (or check_thm_lipschitz for non-C1 candidates) with ρ(B_i(x)) as the bound.
Verdict check_relaxed(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg,
                      const UniquenessFunction& rho);
// From pre-invariance to invariance: no finite escape (recorded as a flag) and flows from (K∩∂C)\D.
Verdict check_invariance_completion(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg,
                                    CompletionMode mode);
Verdict check_contractive_c1(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg);
Verdict check_contractive_lip(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg);
Verdict check_contractivity_completion(const HybridSystem& h, const BarrierCandidate& b, const CheckConfig& cfg);
Verdict check_cset(const HybridSystem& h, const std::optional<BarrierCandidate>& b, const CheckConfig& cfg,
                   CsetDirection direction);

}  // namespace hibarrier
