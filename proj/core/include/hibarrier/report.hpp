#pragma once

#include "hibarrier/certificates.hpp"
#include "hibarrier/simulator.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace hibarrier::report {

inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const CheckConfig& cfg);
nlohmann::json to_json(const Verdict& v, bool with_evaluations = false);
nlohmann::json to_json(const Horizon& h);
nlohmann::json to_json(const FalsifyResult& r);
nlohmann::json to_json(const ProbeResult& r);

// {"tool": .., "version": .., "command": .., "config": .., "results": .., "timing": ..}
nlohmann::json make(const std::string& command, nlohmann::json config, nlohmann::json results, nlohmann::json timing);

// The report without its "timing" member; equal for identical invocations.
nlohmann::json without_timing(nlohmann::json report);

}  // namespace hibarrier::report
