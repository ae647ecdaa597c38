#include "flowsched/fixtures.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "flowsched/error.hpp"

namespace flowsched {

namespace {

// Single-width aisles along the listed rows and columns; shelving elsewhere.
FixtureFile aisle_warehouse(std::string name, int width, int height, const std::set<int>& rows,
                            const std::set<int>& cols, const std::vector<Coord>& stations) {
  std::vector<bool> open(static_cast<std::size_t>(width * height));
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      open[static_cast<std::size_t>(y * width + x)] = rows.count(y) || cols.count(x);
    }
  }
  MapSidecar sidecar;
  sidecar.stations = stations;
  return {std::move(name), format_map(GridMap(width, height, std::move(open))), format_sidecar(sidecar)};
}

std::set<int> every(int step, int limit) {
  std::set<int> out;
  for (int v = 0; v < limit; v += step) out.insert(v);
  out.insert(limit - 1);
  return out;
}

}  // namespace

std::vector<FixtureFile> bundled_fixtures() {
  std::vector<FixtureFile> out;
  out.push_back(aisle_warehouse("warehouse-small", 35, 21, every(3, 21), {0, 11, 23, 34},
                                {{0, 10}, {34, 10}, {17, 0}, {17, 20}}));
  out.push_back(aisle_warehouse("warehouse-large", 57, 33, every(3, 33), every(12, 57),
                                {{6, 0}, {30, 0}, {50, 0}, {6, 32}, {30, 32}, {50, 32}, {0, 16}, {56, 16}}));
  out.push_back({"open-10x10", format_map(GridMap(10, 10, std::vector<bool>(100, true))), ""});
  return out;
}

std::vector<std::string> write_fixtures(const std::string& directory) {
  std::filesystem::create_directories(directory);
  std::vector<std::string> paths;
  for (const FixtureFile& f : bundled_fixtures()) {
    const auto base = std::filesystem::path(directory) / f.name;
    const std::string map_path = base.string() + ".map";
    std::ofstream(map_path) << f.map_text;
    std::ofstream(base.string() + ".sidecar") << f.sidecar_text;
    paths.push_back(map_path);
  }
  return paths;
}

Scenario fixture_scenario(std::string_view name) {
  for (const FixtureFile& f : bundled_fixtures()) {
    if (f.name == name) return Scenario::from_text(f.name, f.map_text, f.sidecar_text);
  }
  throw Error(ErrorCode::ConfigError, "no bundled fixture named '" + std::string(name) + "'");
}

Scenario resolve_scenario(const std::string& spec) {
  if (std::filesystem::exists(spec)) return Scenario::load(spec);
  return fixture_scenario(spec);
}

}  // namespace flowsched
