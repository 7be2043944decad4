#pragma once

#include "hibarrier/config.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hibarrier::catalog {

struct Fixture {
    std::string_view id;
    std::string_view summary;
    std::string_view json;  // a system file with an `expected` block
};

std::span<const Fixture> fixtures();
std::vector<std::string> ids();
// nullptr when unknown
const Fixture* find(std::string_view id);
// Throws std::out_of_range for unknown ids.
config::SystemConfig load(std::string_view id);

}  // namespace hibarrier::catalog
