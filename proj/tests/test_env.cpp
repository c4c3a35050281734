#include "doctest.h"

#include <algorithm>
#include <set>

#include "eigenopt/errors.hpp"
#include "eigenopt/features.hpp"
#include "eigenopt/grid_world.hpp"
#include "eigenopt/io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace eigenopt;

namespace {

ParseErrorKind parse_failure(const std::string& text, int* line = nullptr, int* column = nullptr) {
  try {
    parse_map(text);
  } catch (const ParseError& e) {
    if (line) *line = e.line();
    if (column) *column = e.column();
    return e.kind();
  }
  FAIL("expected a parse error");
  return ParseErrorKind::kEmpty;
}

}  // namespace

TEST_CASE("parse_map builds open grids") {
  const auto g = parse_map("..\n..\n");
  CHECK(g.num_states() == 4);
  CHECK(g.width() == 2);
  CHECK(g.height() == 2);
  CHECK(fixtures::open_grid().num_states() == 100);
}

TEST_CASE("parse_map state indexing is row-major over free cells") {
  const auto g = parse_map(".X.\n...\n");
  REQUIRE(g.num_states() == 5);
  CHECK(g.cell(0) == Cell{0, 0});
  CHECK(g.cell(1) == Cell{0, 2});
  CHECK(g.cell(2) == Cell{1, 0});
  CHECK(g.cell(4) == Cell{1, 2});
  CHECK_FALSE(g.state_at({0, 1}).has_value());
  CHECK_FALSE(g.state_at({-1, 0}).has_value());
}

TEST_CASE("parse_map records S and G anchors as free cells") {
  const auto g = parse_map("S.\n.G\n");
  CHECK(g.num_states() == 4);
  CHECK(g.start() == State{0});
  CHECK(g.goal() == State{3});
  const auto plain = parse_map("..\n");
  CHECK_FALSE(plain.start().has_value());
  CHECK_FALSE(plain.goal().has_value());
}

TEST_CASE("parse_map errors are distinct and located") {
  int line = 0;
  int column = 0;
  CHECK(parse_failure(".X.\nX.X\n.X.\n") == ParseErrorKind::kDisconnected);
  CHECK(parse_failure("...\n..\n", &line) == ParseErrorKind::kNonRectangular);
  CHECK(line == 2);
  CHECK(parse_failure("..\n.#\n", &line, &column) == ParseErrorKind::kIllegalCharacter);
  CHECK(line == 2);
  CHECK(column == 2);
  CHECK(parse_failure("XX\nXX\n") == ParseErrorKind::kNoFreeCells);
  CHECK(parse_failure("") == ParseErrorKind::kEmpty);
  CHECK(parse_failure("; only a comment\n") == ParseErrorKind::kEmpty);
  CHECK_THROWS_AS(parse_map("S.S\n"), ParseError);
}

TEST_CASE("parse_map comments, carriage returns and trailing newline") {
  const auto a = parse_map("; header\r\n..\r\n.X\r\n");
  const auto b = parse_map("..\n.X");
  CHECK(a.render() == b.render());
  CHECK(a.render() == "..\n.X\n");
}

TEST_CASE("render round-trips the normalized map text") {
  for (const auto& name : fixtures::kCanonicalMaps) {
    const std::string text = read_text_file(fixtures::map_path(name));
    CHECK(parse_map(text).render() == normalize_map_text(text));
  }
  const std::string tricky = "; c\r\nS..\r\n.XG\r\n\r\n";
  CHECK(parse_map(tricky).render() == normalize_map_text(tricky));
  CHECK(normalize_map_text(tricky) == "S..\n.XG\n");
}

TEST_CASE("canonical map sizes") {
  CHECK(fixtures::four_room().num_states() == 104);
  CHECK(fixtures::i_maze().num_states() == 38);
  CHECK(fixtures::open_grid().width() == 10);
}

TEST_CASE("step: wall bumps and moves") {
  const auto g = fixtures::open_grid();
  const State corner = fixtures::at(g, 0, 0);
  CHECK(g.step(corner, Action::kUp) == corner);
  CHECK(g.step(corner, Action::kLeft) == corner);
  const State mid = fixtures::at(g, 4, 4);
  CHECK(g.step(mid, Action::kRight) == fixtures::at(g, 4, 5));
  CHECK(g.step(mid, Action::kUp) == fixtures::at(g, 3, 4));
  CHECK_THROWS_AS(g.step(mid, Action::kTerminate), PreconditionError);
}

TEST_CASE("step matches brute-force geometric enumeration on the canonical maps") {
  for (const auto& name : fixtures::kCanonicalMaps) {
    const auto g = load_map(fixtures::map_path(name));
    for (State s = 0; s < g.num_states(); ++s) {
      for (Action a : kPrimitiveActions) CHECK(g.step(s, a) == oracle::geometric_step(g, s, a));
    }
  }
}

TEST_CASE("four-room doorways pass between rooms") {
  const auto g = fixtures::four_room();
  const State door = fixtures::at(g, 3, 6);
  CHECK(g.step(door, Action::kLeft) == fixtures::at(g, 3, 5));
  CHECK(g.step(door, Action::kRight) == fixtures::at(g, 3, 7));
  CHECK(g.step(door, Action::kUp) == door);

  std::set<Cell> doors;
  for (State s : doorway_states(g)) doors.insert(g.cell(s));
  CHECK(doors == std::set<Cell>{{3, 6}, {6, 2}, {7, 9}, {10, 6}});

  const auto labels = room_labels(g);
  CHECK(*std::max_element(labels.begin(), labels.end()) == 3);
  CHECK(labels[door] == -1);
  CHECK(labels[fixtures::at(g, 1, 1)] != labels[fixtures::at(g, 1, 11)]);
  CHECK(labels[fixtures::at(g, 1, 1)] == labels[fixtures::at(g, 5, 5)]);
}

TEST_CASE("environment invariants on the canonical maps") {
  for (const auto& name : fixtures::kCanonicalMaps) {
    const auto g = load_map(fixtures::map_path(name));
    const auto floyd = oracle::all_pairs_distances(g);
    for (State s = 0; s < g.num_states(); ++s) {
      for (Action a : kPrimitiveActions) {
        const State t = g.step(s, a);
        if (t == s) CHECK(g.step(t, a) == s);
        if (t != s) {
          bool back = false;
          for (Action b : kPrimitiveActions) back = back || g.step(t, b) == s;
          CHECK(back);
        }
      }
    }
    for (State from : {State{0}, g.num_states() / 2, g.num_states() - 1}) {
      const auto d = bfs_distances(g, from);
      for (State s = 0; s < g.num_states(); ++s) {
        CHECK(d[s] != kUnreachable);
        CHECK(d[s] == floyd[from][s]);
      }
    }
  }
}

TEST_CASE("tabular features are one-hot") {
  const auto g = fixtures::corridor(3);
  const auto f = FeatureMap::tabular(g);
  CHECK(f.dim() == 3);
  CHECK(features(g, f, 0) == Eigen::Vector3d(1, 0, 0));
  for (State s = 0; s < 3; ++s) CHECK(f.vector(s).sum() == 1.0);
  CHECK(f.kind() == FeatureKind::kTabular);
}

TEST_CASE("coordinate-synthetic features are injective and deterministic") {
  for (const auto& name : fixtures::kCanonicalMaps) {
    const auto g = load_map(fixtures::map_path(name));
    const auto f = FeatureMap::coordinate_synthetic(g);
    CHECK(f.dim() == 6);
    std::set<std::vector<double>> seen;
    for (State s = 0; s < g.num_states(); ++s) {
      const auto v = f(s);
      seen.insert(std::vector<double>(v.begin(), v.end()));
    }
    CHECK(seen.size() == g.num_states());
    CHECK(FeatureMap::coordinate_synthetic(g).vector(3) == f.vector(3));
  }
  const auto g = fixtures::open_grid();
  const auto f = FeatureMap::coordinate_synthetic(g);
  const auto v = f.vector(fixtures::at(g, 0, 9));
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 1.0);
  CHECK(v[2] == 1.0);  // wall above
  CHECK(v[3] == 0.0);
  CHECK(v[4] == 1.0);  // wall to the right
  CHECK(v[5] == 0.0);
}
