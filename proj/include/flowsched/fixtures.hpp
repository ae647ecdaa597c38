#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowsched/engine.hpp"

namespace flowsched {

struct FixtureFile {
  std::string name;
  std::string map_text;
  std::string sidecar_text;
};

// warehouse-small (35x21), warehouse-large (57x33) and open-10x10.
std::vector<FixtureFile> bundled_fixtures();

// Writes <name>.map and <name>.sidecar for every bundled fixture; returns the
// map paths.
std::vector<std::string> write_fixtures(const std::string& directory);

Scenario fixture_scenario(std::string_view name);

// A map file path, or the name of a bundled fixture when no such file exists.
Scenario resolve_scenario(const std::string& spec);

}  // namespace flowsched
