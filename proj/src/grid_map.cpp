#include "flowsched/grid_map.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <sstream>

#include "flowsched/error.hpp"

namespace flowsched {

namespace {

constexpr std::array<int, 4> kDx = {0, 1, 0, -1};
constexpr std::array<int, 4> kDy = {-1, 0, 1, 0};

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}

std::optional<Direction> parse_direction(std::string_view token) {
  token = trim(token);
  if (token == "N") return Direction::North;
  if (token == "E") return Direction::East;
  if (token == "S") return Direction::South;
  if (token == "W") return Direction::West;
  return std::nullopt;
}

GridMap::GridMap(int width, int height, std::vector<bool> traversable)
    : width_(width), height_(height), traversable_(std::move(traversable)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::MalformedHeader, "map dimensions must be positive");
  }
  if (traversable_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::RowLengthMismatch, "cell count does not match width x height");
  }
  out_.assign(static_cast<std::size_t>(size()) * 4, kNoCell);
  in_.assign(static_cast<std::size_t>(size()) * 4, kNoCell);
  for (CellId c = 0; c < size(); ++c) {
    if (!traversable_[c]) continue;
    ++traversable_count_;
    const Coord p = coord(c);
    for (Direction d : kDirections) {
      const int nx = p.x + kDx[static_cast<int>(d)];
      const int ny = p.y + kDy[static_cast<int>(d)];
      if (!in_bounds(nx, ny)) continue;
      const CellId n = cell(nx, ny);
      if (!traversable_[n]) continue;
      out_[slot(c, d)] = n;
      in_[slot(c, d)] = n;
    }
  }
}

bool GridMap::has_edge(CellId from, CellId to) const {
  if (!traversable(from) || !traversable(to)) return false;
  if (from == to) return true;
  for (Direction d : kDirections) {
    if (neighbor(from, d) == to) return true;
  }
  return false;
}

int GridMap::open_degree(CellId c) const {
  if (!traversable(c)) return 0;
  const Coord p = coord(c);
  int degree = 0;
  for (Direction d : kDirections) {
    const int nx = p.x + kDx[static_cast<int>(d)];
    const int ny = p.y + kDy[static_cast<int>(d)];
    if (in_bounds(nx, ny) && traversable_[cell(nx, ny)]) ++degree;
  }
  return degree;
}

std::vector<CellId> GridMap::traversable_cells() const {
  std::vector<CellId> cells;
  cells.reserve(static_cast<std::size_t>(traversable_count_));
  for (CellId c = 0; c < size(); ++c) {
    if (traversable_[c]) cells.push_back(c);
  }
  return cells;
}

bool GridMap::restrict_one_way(CellId from, Direction d) {
  if (!traversable(from)) return false;
  const CellId to = neighbor(from, d);
  if (to == kNoCell) return false;
  const Direction back = opposite(d);
  // Drop to -> from.
  out_[slot(to, back)] = kNoCell;
  in_[slot(from, d)] = kNoCell;
  directed_ = true;
  return true;
}

GridMap parse_map(std::string_view text) {
  const auto lines = split_lines(text);
  std::optional<int> width;
  std::optional<int> height;
  std::size_t row_start = 0;
  bool saw_map = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    if (line == "map") {
      saw_map = true;
      row_start = i + 1;
      break;
    }
    const auto space = line.find_first_of(" \t");
    if (space == std::string_view::npos) {
      throw Error(ErrorCode::MalformedHeader, "unexpected header line '" + std::string(line) + "'");
    }
    const std::string_view key = line.substr(0, space);
    const std::string_view value = line.substr(space + 1);
    if (key == "type") continue;
    if (key == "height" || key == "width") {
      const auto parsed = parse_int(value);
      if (!parsed || *parsed <= 0) {
        throw Error(ErrorCode::MalformedHeader, "bad " + std::string(key) + " value");
      }
      (key == "height" ? height : width) = parsed;
      continue;
    }
    throw Error(ErrorCode::MalformedHeader, "unknown header key '" + std::string(key) + "'");
  }
  if (!saw_map || !width || !height) {
    throw Error(ErrorCode::MalformedHeader, "header needs height, width and map lines");
  }

  std::vector<bool> traversable;
  traversable.reserve(static_cast<std::size_t>(*width) * static_cast<std::size_t>(*height));
  int rows = 0;
  for (std::size_t i = row_start; i < lines.size(); ++i) {
    const std::string_view row = lines[i];
    if (rows == *height) {
      if (!trim(row).empty()) {
        throw Error(ErrorCode::RowLengthMismatch, "more rows than the declared height");
      }
      continue;
    }
    if (static_cast<int>(row.size()) != *width) {
      throw Error(ErrorCode::RowLengthMismatch,
                  "row " + std::to_string(rows) + " has " + std::to_string(row.size()) +
                      " cells, expected " + std::to_string(*width));
    }
    for (char ch : row) {
      switch (ch) {
        case '.': traversable.push_back(true); break;
        case '@':
        case 'T': traversable.push_back(false); break;
        default:
          throw Error(ErrorCode::UnknownCell,
                      std::string("unknown cell character '") + ch + "' in row " + std::to_string(rows));
      }
    }
    ++rows;
  }
  if (rows != *height) {
    throw Error(ErrorCode::RowLengthMismatch,
                "found " + std::to_string(rows) + " rows, expected " + std::to_string(*height));
  }
  return GridMap(*width, *height, std::move(traversable));
}

MapSidecar parse_sidecar(std::string_view text) {
  MapSidecar sidecar;
  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '(' && line.back() == ')') line = line.substr(1, line.size() - 2);

    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      parts.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const auto bad = [&] {
      return Error(ErrorCode::MalformedSidecar, "line " + std::to_string(line_no) + ": '" +
                                                    std::string(raw) + "'");
    };
    if (parts.size() != 2 && parts.size() != 3) throw bad();
    const auto x = parse_int(parts[0]);
    const auto y = parse_int(parts[1]);
    if (!x || !y) throw bad();
    if (parts.size() == 2) {
      sidecar.stations.push_back({*x, *y});
    } else {
      const auto d = parse_direction(parts[2]);
      if (!d) throw bad();
      sidecar.one_way.emplace_back(Coord{*x, *y}, *d);
    }
  }
  return sidecar;
}

void apply_sidecar(GridMap& map, const MapSidecar& sidecar) {
  for (const auto& [at, d] : sidecar.one_way) {
    if (!map.in_bounds(at.x, at.y) || !map.restrict_one_way(map.cell(at), d)) {
      throw Error(ErrorCode::MalformedSidecar, "one-way edge at (" + std::to_string(at.x) + "," +
                                                   std::to_string(at.y) + ") is not a map edge");
    }
  }
}

std::string format_map(const GridMap& map) {
  std::ostringstream out;
  out << "type octile\nheight " << map.height() << "\nwidth " << map.width() << "\nmap\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out << (map.traversable(map.cell(x, y)) ? '.' : '@');
    out << '\n';
  }
  return out.str();
}

std::string format_sidecar(const MapSidecar& sidecar) {
  static constexpr std::array<char, 4> kNames = {'N', 'E', 'S', 'W'};
  std::ostringstream out;
  for (const Coord& s : sidecar.stations) out << s.x << ',' << s.y << '\n';
  for (const auto& [at, d] : sidecar.one_way) {
    out << at.x << ',' << at.y << ',' << kNames[static_cast<int>(d)] << '\n';
  }
  return out.str();
}

namespace {

template <typename NextFn>
DistField bfs(const GridMap& map, CellId source, NextFn next) {
  if (!map.traversable(source)) {
    throw Error(ErrorCode::SourceBlocked, "cell " + std::to_string(source) + " is not traversable");
  }
  DistField field;
  field.source = source;
  field.dist.assign(static_cast<std::size_t>(map.size()), kUnreachable);
  std::deque<CellId> queue;
  field.dist[source] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    const CellId u = queue.front();
    queue.pop_front();
    for (Direction d : kDirections) {
      const CellId v = next(u, d);
      if (v == kNoCell || field.dist[v] != kUnreachable) continue;
      field.dist[v] = field.dist[u] + 1;
      queue.push_back(v);
    }
  }
  return field;
}

}  // namespace

DistField dist_field(const GridMap& map, CellId source) {
  return bfs(map, source, [&](CellId u, Direction d) { return map.neighbor(u, d); });
}

DistField dist_to_field(const GridMap& map, CellId target) {
  return bfs(map, target, [&](CellId u, Direction d) { return map.in_neighbor(u, d); });
}

DistanceOracle::DistanceOracle(const GridMap& map)
    : map_(map), to_fields_(static_cast<std::size_t>(map.size())),
      once_(static_cast<std::size_t>(map.size())) {}

const std::vector<Dist>& DistanceOracle::field_to(CellId target) const {
  const auto idx = static_cast<std::size_t>(target);
  std::call_once(once_[idx], [&] { to_fields_[idx] = dist_to_field(map_, target).dist; });
  return to_fields_[idx];
}

Dist DistanceOracle::dist(CellId from, CellId to) const {
  if (!map_.traversable(from) || !map_.traversable(to)) return kUnreachable;
  return field_to(to)[static_cast<std::size_t>(from)];
}

}  // namespace flowsched
