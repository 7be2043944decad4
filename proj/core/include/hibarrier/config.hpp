#pragma once

#include "hibarrier/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hibarrier::config {

// A malformed or inconsistent system file. line/column are 1-based positions in the source text.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string message, std::string origin, std::string pointer, int line, int column);

    const std::string& origin() const { return origin_; }
    const std::string& pointer() const { return pointer_; }
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    std::string message_;
    std::string origin_;
    std::string pointer_;
    int line_;
    int column_;
};

struct BarrierSpec {
    std::string expr;
    std::optional<Smoothness> smoothness;  // inferred from the expression when absent
};

struct ExpectedCheck {
    std::string theorem;
    std::string status;               // NoViolationFound | Violated | Inconclusive
    std::optional<std::string> option;
    std::optional<std::string> rho;
};

struct ExpectedFalsify {
    std::string mode = "invariance";  // invariance | contractivity
    bool counterexample = false;
    int budget = 50;
    double T = 5.0;
    int J = 10;
    double step = 1e-2;
};

struct Expected {
    std::vector<ExpectedCheck> checks;
    std::vector<ExpectedFalsify> falsify;
    nlohmann::json settings = nlohmann::json::object();  // overrides for the check settings
    std::vector<std::string> notes;
};

struct SystemConfig {
    std::string name;
    int dim = 0;
    int params = 0;
    expr::Constants constants;
    nlohmann::json C;
    nlohmann::json D;
    std::vector<std::string> F;
    std::vector<std::string> G;
    std::vector<BarrierSpec> barrier;
    Box box;
    std::optional<Expected> expected;
    nlohmann::json source;     // the document as read
    std::string origin;
    std::string source_text;   // kept for error positions
};

// Throws ConfigError.
SystemConfig parse_config(std::string_view text, const std::string& origin = "<input>");
SystemConfig load_config(const std::filesystem::path& path);

struct Model {
    HybridSystem system;
    BarrierCandidate barrier;
    Box box;
};

// Throws ConfigError; positions are 0 when the config has no source text.
Model build_model(const SystemConfig& cfg);

// Inverse of parse_config for the `source` document.
std::string dump(const SystemConfig& cfg);

}  // namespace hibarrier::config
