#pragma once

#include <array>
#include <string>

#include "eigenopt/grid_world.hpp"

namespace fixtures {

inline std::string map_path(const std::string& file) { return std::string(EIGENOPT_MAPS_DIR) + "/" + file; }

inline eigenopt::GridWorld four_room() { return eigenopt::load_map(map_path("four_room.txt")); }
inline eigenopt::GridWorld open_grid() { return eigenopt::load_map(map_path("open_10x10.txt")); }
inline eigenopt::GridWorld i_maze() { return eigenopt::load_map(map_path("i_maze.txt")); }

inline const std::array<std::string, 3> kCanonicalMaps = {"four_room.txt", "open_10x10.txt", "i_maze.txt"};

/// 1 x n corridor.
inline eigenopt::GridWorld corridor(int n) { return eigenopt::parse_map(std::string(static_cast<std::size_t>(n), '.')); }

inline eigenopt::State at(const eigenopt::GridWorld& g, int row, int col) { return *g.state_at({row, col}); }

}  // namespace fixtures
