#pragma once

#include <span>
#include <string_view>

namespace mfg::cli {

struct Scenario {
  std::string_view name;
  std::string_view description;
  std::string_view yaml;
};

std::span<const Scenario> bundled_scenarios() noexcept;
const Scenario* find_scenario(std::string_view name) noexcept;

}  // namespace mfg::cli
