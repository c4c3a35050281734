#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eigenopt {

/// Primitive moves plus the option-terminate action. The enumerator order is
/// the tie-break order used everywhere in the toolkit.
enum class Action : std::uint8_t { kUp = 0, kDown = 1, kRight = 2, kLeft = 3, kTerminate = 4 };

inline constexpr std::size_t kNumPrimitiveActions = 4;
inline constexpr std::array<Action, kNumPrimitiveActions> kPrimitiveActions = {
    Action::kUp, Action::kDown, Action::kRight, Action::kLeft};

constexpr std::size_t action_index(Action a) noexcept { return static_cast<std::size_t>(a); }

std::string_view action_name(Action a) noexcept;
std::optional<Action> parse_action(std::string_view name) noexcept;

using State = std::size_t;

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Deterministic 4-action gridworld. Free cells are indexed row-major; moving
/// into a wall or off the grid leaves the state unchanged. Immutable after
/// construction.
class GridWorld {
 public:
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t num_states() const noexcept { return cells_.size(); }

  Cell cell(State s) const { return cells_.at(s); }
  std::span<const Cell> cells() const noexcept { return cells_; }
  std::optional<State> state_at(Cell c) const;
  bool is_free(Cell c) const;

  /// Primitive transition. `a` must not be Action::kTerminate.
  State step(State s, Action a) const;

  /// Number of distinct neighbours reachable in one move (wall bumps excluded).
  std::size_t degree(State s) const;

  std::optional<State> start() const noexcept { return start_; }
  std::optional<State> goal() const noexcept { return goal_; }

  /// Map text in the 'X' / '.' / 'S' / 'G' dialect, one '\n'-terminated row per line.
  std::string render() const;

  friend GridWorld parse_map(std::string_view text);

 private:
  GridWorld() = default;

  int width_ = 0;
  int height_ = 0;
  std::vector<int> index_;  // row-major cell -> state, -1 for walls
  std::vector<Cell> cells_;
  std::vector<std::array<State, kNumPrimitiveActions>> next_;
  std::optional<State> start_;
  std::optional<State> goal_;
};

/// Parses the map dialect. Lines whose first character is ';' are comments;
/// '\r' before a newline is ignored; a trailing newline is optional.
GridWorld parse_map(std::string_view text);
GridWorld load_map(const std::filesystem::path& path);

/// The text render(parse_map(text)) reproduces: comments and carriage returns
/// dropped, trailing blank lines dropped, every row '\n'-terminated.
std::string normalize_map_text(std::string_view text);

inline constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);

/// Shortest primitive-step distances from `from` to every state.
std::vector<std::size_t> bfs_distances(const GridWorld& g, State from);

/// Free cells forming a one-cell gap in a straight wall: exactly two free
/// neighbours on opposite sides, walls on the other two.
std::vector<State> doorway_states(const GridWorld& g);
bool is_doorway(const GridWorld& g, State s);

/// Connected components of the free-cell graph once doorways are removed.
/// Doorways get -1; rooms are numbered in order of their lowest state index.
std::vector<int> room_labels(const GridWorld& g);

}  // namespace eigenopt
