#pragma once

#include "hibarrier/catalog.hpp"
#include "hibarrier/certificates.hpp"
#include "hibarrier/config.hpp"

#include <string_view>

namespace hibarrier::testing {

inline config::Model model_of(std::string_view json) { return config::build_model(config::parse_config(json)); }
inline config::Model fixture(std::string_view id) { return config::build_model(catalog::load(id)); }

inline CheckConfig check_config(const config::Model& m, std::uint64_t seed = 1) {
    CheckConfig c;
    c.box = m.box;
    c.seed = seed;
    return c;
}

inline Vec v2(double a, double b) { return Vec{{a, b}}; }

}  // namespace hibarrier::testing
