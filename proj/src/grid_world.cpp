#include "eigenopt/grid_world.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "eigenopt/errors.hpp"

namespace eigenopt {

namespace {

constexpr std::array<Cell, kNumPrimitiveActions> kMoves = {
    Cell{-1, 0}, Cell{1, 0}, Cell{0, 1}, Cell{0, -1}};

struct RawLine {
  std::string_view text;
  int number;  // 1-based, counted in the original text
};

std::vector<RawLine> grid_lines(std::string_view text) {
  std::vector<RawLine> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() != ';') lines.push_back({line, number});
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().text.empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string_view action_name(Action a) noexcept {
  switch (a) {
    case Action::kUp: return "up";
    case Action::kDown: return "down";
    case Action::kRight: return "right";
    case Action::kLeft: return "left";
    case Action::kTerminate: return "terminate";
  }
  return "?";
}

std::optional<Action> parse_action(std::string_view name) noexcept {
  for (Action a : {Action::kUp, Action::kDown, Action::kRight, Action::kLeft, Action::kTerminate}) {
    if (action_name(a) == name) return a;
  }
  return std::nullopt;
}

std::optional<State> GridWorld::state_at(Cell c) const {
  if (c.row < 0 || c.col < 0 || c.row >= height_ || c.col >= width_) return std::nullopt;
  const int idx = index_[static_cast<std::size_t>(c.row * width_ + c.col)];
  if (idx < 0) return std::nullopt;
  return static_cast<State>(idx);
}

bool GridWorld::is_free(Cell c) const { return state_at(c).has_value(); }

State GridWorld::step(State s, Action a) const {
  if (a == Action::kTerminate) throw PreconditionError("step: terminate is not a primitive action");
  return next_.at(s)[action_index(a)];
}

std::size_t GridWorld::degree(State s) const {
  const auto& nx = next_.at(s);
  std::size_t d = 0;
  for (State t : nx) d += (t != s);
  return d;
}

std::string GridWorld::render() const {
  std::string out;
  out.reserve(static_cast<std::size_t>((width_ + 1) * height_));
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      const auto s = state_at({r, c});
      if (!s) {
        out.push_back('X');
      } else if (start_ == s) {
        out.push_back('S');
      } else if (goal_ == s) {
        out.push_back('G');
      } else {
        out.push_back('.');
      }
    }
    out.push_back('\n');
  }
  return out;
}

GridWorld parse_map(std::string_view text) {
  const auto lines = grid_lines(text);
  if (lines.empty()) throw ParseError(ParseErrorKind::kEmpty, 0, 0, "map has no rows");

  GridWorld g;
  g.height_ = static_cast<int>(lines.size());
  g.width_ = static_cast<int>(lines.front().text.size());
  if (g.width_ == 0) {
    throw ParseError(ParseErrorKind::kEmpty, lines.front().number, 1, "first row is empty");
  }
  g.index_.assign(static_cast<std::size_t>(g.width_ * g.height_), -1);

  for (int r = 0; r < g.height_; ++r) {
    const auto& line = lines[static_cast<std::size_t>(r)];
    if (static_cast<int>(line.text.size()) != g.width_) {
      throw ParseError(ParseErrorKind::kNonRectangular, line.number,
                       static_cast<int>(std::min(line.text.size(), std::size_t(g.width_))) + 1,
                       "row has " + std::to_string(line.text.size()) + " cells, expected " +
                           std::to_string(g.width_));
    }
    for (int c = 0; c < g.width_; ++c) {
      const char ch = line.text[static_cast<std::size_t>(c)];
      if (ch == 'X') continue;
      if (ch != '.' && ch != 'S' && ch != 'G') {
        throw ParseError(ParseErrorKind::kIllegalCharacter, line.number, c + 1,
                         std::string("illegal character '") + ch + "'");
      }
      const auto s = static_cast<State>(g.cells_.size());
      g.index_[static_cast<std::size_t>(r * g.width_ + c)] = static_cast<int>(s);
      g.cells_.push_back({r, c});
      if (ch == 'S') {
        if (g.start_) throw ParseError(ParseErrorKind::kIllegalCharacter, line.number, c + 1, "second 'S'");
        g.start_ = s;
      } else if (ch == 'G') {
        if (g.goal_) throw ParseError(ParseErrorKind::kIllegalCharacter, line.number, c + 1, "second 'G'");
        g.goal_ = s;
      }
    }
  }
  if (g.cells_.empty()) throw ParseError(ParseErrorKind::kNoFreeCells, 0, 0, "map has no free cells");

  g.next_.resize(g.cells_.size());
  for (State s = 0; s < g.cells_.size(); ++s) {
    for (std::size_t a = 0; a < kNumPrimitiveActions; ++a) {
      const Cell target{g.cells_[s].row + kMoves[a].row, g.cells_[s].col + kMoves[a].col};
      g.next_[s][a] = g.state_at(target).value_or(s);
    }
  }

  const auto dist = bfs_distances(g, 0);
  for (State s = 0; s < g.cells_.size(); ++s) {
    if (dist[s] == kUnreachable) {
      const Cell c = g.cells_[s];
      throw ParseError(ParseErrorKind::kDisconnected, lines[static_cast<std::size_t>(c.row)].number,
                       c.col + 1, "free cell not connected to the first free cell");
    }
  }

  // Every move must be reversible for the undirected-graph view to hold.
  for (State s = 0; s < g.cells_.size(); ++s) {
    for (State t : g.next_[s]) {
      if (t == s) continue;
      const auto& back = g.next_[t];
      if (std::find(back.begin(), back.end(), s) == back.end()) {
        throw InvariantError("transition graph is not symmetric");
      }
    }
  }
  return g;
}

GridWorld load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

std::string normalize_map_text(std::string_view text) {
  std::string out;
  for (const auto& line : grid_lines(text)) {
    out.append(line.text);
    out.push_back('\n');
  }
  return out;
}

std::vector<std::size_t> bfs_distances(const GridWorld& g, State from) {
  std::vector<std::size_t> dist(g.num_states(), kUnreachable);
  std::deque<State> queue{from};
  dist.at(from) = 0;
  while (!queue.empty()) {
    const State s = queue.front();
    queue.pop_front();
    for (Action a : kPrimitiveActions) {
      const State t = g.step(s, a);
      if (dist[t] == kUnreachable) {
        dist[t] = dist[s] + 1;
        queue.push_back(t);
      }
    }
  }
  return dist;
}

bool is_doorway(const GridWorld& g, State s) {
  const Cell c = g.cell(s);
  const bool up = g.is_free({c.row - 1, c.col});
  const bool down = g.is_free({c.row + 1, c.col});
  const bool right = g.is_free({c.row, c.col + 1});
  const bool left = g.is_free({c.row, c.col - 1});
  return (up && down && !right && !left) || (right && left && !up && !down);
}

std::vector<State> doorway_states(const GridWorld& g) {
  std::vector<State> out;
  for (State s = 0; s < g.num_states(); ++s) {
    if (is_doorway(g, s)) out.push_back(s);
  }
  return out;
}

std::vector<int> room_labels(const GridWorld& g) {
  const std::size_t n = g.num_states();
  std::vector<int> label(n, -2);
  for (State s = 0; s < n; ++s) {
    if (is_doorway(g, s)) label[s] = -1;
  }
  int next_label = 0;
  for (State seed = 0; seed < n; ++seed) {
    if (label[seed] != -2) continue;
    std::deque<State> queue{seed};
    label[seed] = next_label;
    while (!queue.empty()) {
      const State s = queue.front();
      queue.pop_front();
      for (Action a : kPrimitiveActions) {
        const State t = g.step(s, a);
        if (label[t] == -2) {
          label[t] = next_label;
          queue.push_back(t);
        }
      }
    }
    ++next_label;
  }
  return label;
}

}  // namespace eigenopt
