#pragma once

#include <nlohmann/json_fwd.hpp>

#include "bootperc/dynamics.hpp"

namespace bootperc {

// Configuration snapshot document:
//   {format:"bootperc-config", version:1, kind:"torus"|"window", d, n|t,
//    rule:{kind,r}, time, bits:<base64>}
// bits packs one bit per site (1 = infected) in the lattice index order,
// least significant bit of each byte first.
nlohmann::json to_snapshot(const Configuration& c);
Configuration configuration_from_snapshot(const nlohmann::json& doc);

std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace bootperc
