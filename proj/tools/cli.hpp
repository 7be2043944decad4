#pragma once

#include "hibarrier/certificates.hpp"
#include "hibarrier/config.hpp"
#include "hibarrier/simulator.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hibarrier::cli {

enum ExitCode : int { kOk = 0, kViolated = 1, kInconclusive = 2, kUsage = 3 };

inline const std::vector<std::string> kTheorems{"thm1",       "boundary",    "external",    "lipschitz",         "relaxed",
                                                "invariance", "contract-c1", "contract-lip", "contract-complete", "cset"};

// HIBARRIER_SEED when set and numeric, else 1.
std::uint64_t default_seed();

struct CheckSettings {
    CheckConfig cfg;
    std::string rho = "linear:1";
    std::string option = "a";
};

CheckSettings default_settings(const config::Model& m, std::uint64_t seed);
// Keys: samples, radius, band, tol, margin, seed, workers, rho, option. Throws std::invalid_argument.
void apply_settings(CheckSettings& s, const nlohmann::json& overrides);
nlohmann::json to_json(const CheckSettings& s);

struct CheckRun {
    std::string theorem;
    Verdict verdict;
    double seconds = 0.0;
};

// `cset` yields one run per direction. Throws std::invalid_argument for unknown theorems.
std::vector<CheckRun> run_theorem(const config::Model& m, const std::string& theorem, const CheckSettings& s);

// Exit code for a set of verdicts: any Violated → 1, else any Inconclusive → 2, else 0.
int exit_code(const std::vector<CheckRun>& runs);

struct FalsifyRequest {
    std::string mode = "invariance";  // invariance | contractivity
    int budget = 50;
    Horizon horizon{5.0, 10, 1e-2};
    std::uint64_t seed = 1;
    int workers = 1;
};

struct FalsifyRun {
    FalsifyRequest request;
    std::optional<FalsifyResult> invariance;
    std::optional<ProbeResult> contractivity;
    double seconds = 0.0;

    bool found() const;
    // The counterexample or lingering arc, when there is one.
    const HybridArc* witness_arc() const;
};

FalsifyRun run_falsify(const config::Model& m, const FalsifyRequest& req);
nlohmann::json to_json(const FalsifyRequest& r);

struct ExampleOutcome {
    bool pass = true;
    std::vector<std::string> lines;
};

// Runs the checks and falsifier runs listed in the fixture's expected block.
ExampleOutcome run_example(const config::SystemConfig& cfg, std::uint64_t seed, int workers = 1);

// Parses "const:0.1,0.2", "random", "adversarial:3". Throws std::invalid_argument.
ParameterRule parse_policy(const std::string& text);
// Parses "flow", "jump", "bernoulli:p". Throws std::invalid_argument.
OverlapRule parse_overlap(const std::string& text);

// Entry point without the program name; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hibarrier::cli
