#pragma once

// JSON views of parameter structs. Readers reject unknown keys and leave
// absent keys at the value of `base`.

#include <json.hpp>

#include "qlane/game.hpp"
#include "qlane/lattice.hpp"

namespace qlane {

nlohmann::json to_json(const SimParams& p);
SimParams sim_params_from_json(const nlohmann::json& j, SimParams base = {});

nlohmann::json to_json(const SyntheticTableSpec& spec);
SyntheticTableSpec synthetic_spec_from_json(const nlohmann::json& j,
                                            SyntheticTableSpec base = SyntheticTableSpec::defaults());

// Throws ConfigError naming the first key of `j` not listed in `allowed`.
void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

}  // namespace qlane
