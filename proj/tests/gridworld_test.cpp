#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "disdain/gridworld.hpp"
#include "oracles.hpp"

using namespace disdain;

namespace {

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> rows;
  std::stringstream ss{std::string(text)};
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  return rows;
}

}  // namespace

TEST(Layout, CanonicalMapHas104States) {
  const Layout& layout = four_rooms();
  EXPECT_EQ(layout.num_states(), 104);
  EXPECT_EQ(layout.rows(), 13);
  EXPECT_EQ(layout.cols(), 13);
  EXPECT_EQ(layout.start(), (Cell{1, 1}));
}

TEST(Layout, BorderIsWall) {
  const Layout& layout = four_rooms();
  for (int i = 0; i < 13; ++i) {
    EXPECT_FALSE(layout.walkable({0, i}));
    EXPECT_FALSE(layout.walkable({12, i}));
    EXPECT_FALSE(layout.walkable({i, 0}));
    EXPECT_FALSE(layout.walkable({i, 12}));
  }
}

TEST(Layout, StateIndexIsBijection) {
  const Layout& layout = four_rooms();
  for (StateId s = 0; s < layout.num_states(); ++s) {
    EXPECT_EQ(layout.state_of(layout.cell_of(s)), s);
  }
}

TEST(Layout, ShippedAssetMatchesEmbeddedMap) {
  std::ifstream in(DISDAIN_ASSET_DIR "/four_rooms.txt");
  ASSERT_TRUE(in);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), std::string(four_rooms_map_text()));
  EXPECT_EQ(load_layout(text.str()).to_text(), four_rooms().to_text());
}

TEST(Layout, AllWallsExceptStartReportsCount) {
  std::string map;
  for (int r = 0; r < 13; ++r) {
    std::string row(13, '#');
    if (r == 1) row[1] = 'S';
    map += row + "\n";
  }
  try {
    load_layout(map);
    FAIL() << "expected a validation failure";
  } catch (const LayoutError& e) {
    EXPECT_NE(std::string(e.what()).find("count 1"), std::string::npos) << e.what();
  }
}

TEST(Layout, RaggedRowsRejected) {
  EXPECT_THROW(load_layout("#####\n#S..#\n#..#\n#####\n", LayoutRequirements::structural_only()),
               LayoutError);
}

TEST(Layout, StartCountEnforced) {
  const auto req = LayoutRequirements::structural_only();
  EXPECT_THROW(load_layout("#####\n#...#\n#####\n", req), LayoutError);
  EXPECT_THROW(load_layout("#####\n#S.S#\n#####\n", req), LayoutError);
  EXPECT_NO_THROW(load_layout("#####\n#S..#\n#####\n", req));
}

TEST(Layout, OpenBorderRejected) {
  EXPECT_THROW(load_layout("#####\n#S...\n#####\n", LayoutRequirements::structural_only()),
               LayoutError);
}

TEST(Layout, DisconnectedCellsRejected) {
  EXPECT_THROW(load_layout("######\n#S#..#\n######\n", LayoutRequirements::structural_only()),
               LayoutError);
}

TEST(Layout, HorizonRequirementChecked) {
  // A corridor of 6 cells: one cell beyond distance 4.
  const std::string corridor = "########\n#S.....#\n########\n";
  EXPECT_NO_THROW(load_layout(corridor, {6, 4, 1}));
  EXPECT_THROW(load_layout(corridor, {6, 5, 1}), LayoutError);
}

TEST(Reset, StartsTopLeft) {
  const Layout& layout = four_rooms();
  const auto a = reset(layout);
  const auto b = reset(layout);
  EXPECT_EQ(layout.cell_of(a.position), (Cell{1, 1}));
  EXPECT_EQ(a.steps_taken, 0);
  EXPECT_EQ(a, b);
}

TEST(Reset, AfterFinishedEpisode) {
  const Layout& layout = four_rooms();
  EpisodeState s = reset(layout);
  for (int t = 0; t < 20; ++t) s = step(layout, s, Action::kRight).state;
  EXPECT_EQ(s.steps_taken, 20);
  EXPECT_EQ(reset(layout).steps_taken, 0);
}

TEST(Step, WallBlocksMovement) {
  const Layout& layout = four_rooms();
  const auto s0 = reset(layout);
  EXPECT_EQ(layout.cell_of(step(layout, s0, Action::kUp).state.position), (Cell{1, 1}));
  EXPECT_EQ(layout.cell_of(step(layout, s0, Action::kLeft).state.position), (Cell{1, 1}));
  EXPECT_EQ(layout.cell_of(step(layout, s0, Action::kRight).state.position), (Cell{1, 2}));
  EXPECT_EQ(layout.cell_of(step(layout, s0, Action::kDown).state.position), (Cell{2, 1}));
}

TEST(Step, EpisodeEndsAtTwenty) {
  const Layout& layout = four_rooms();
  EpisodeState s = reset(layout);
  for (int t = 1; t <= 20; ++t) {
    const auto r = step(layout, s, Action::kNoop);
    EXPECT_EQ(r.done, t == 20);
    s = r.state;
  }
  EXPECT_THROW(step(layout, s, Action::kNoop), std::logic_error);
}

TEST(Step, ExhaustiveMovementRule) {
  const Layout& layout = four_rooms();
  for (StateId s = 0; s < layout.num_states(); ++s) {
    const Cell from = layout.cell_of(s);
    for (Action a : kAllActions) {
      const EpisodeState st{s, 3};
      const auto r1 = step(layout, st, a);
      const auto r2 = step(layout, st, a);
      EXPECT_EQ(r1.state, r2.state);
      EXPECT_EQ(r1.state.steps_taken, 4);
      const Cell to = layout.cell_of(r1.state.position);
      ASSERT_TRUE(layout.walkable(to));
      const int moved = std::abs(to.row - from.row) + std::abs(to.col - from.col);
      if (a == Action::kNoop) {
        EXPECT_EQ(moved, 0);
      } else {
        Cell target = from;
        if (a == Action::kLeft) target.col -= 1;
        if (a == Action::kRight) target.col += 1;
        if (a == Action::kUp) target.row -= 1;
        if (a == Action::kDown) target.row += 1;
        EXPECT_EQ(to, layout.walkable(target) ? target : from);
      }
    }
  }
}

TEST(ShortestPaths, MatchesFloodFillOracle) {
  const Layout& layout = four_rooms();
  const auto rows = lines_of(four_rooms_map_text());
  const auto oracle_dist = oracle::grid_distances(rows, 1, 1);
  const auto dist = shortest_path_distances(layout);
  EXPECT_EQ(dist[static_cast<std::size_t>(layout.start_state())], 0);
  for (StateId s = 0; s < layout.num_states(); ++s) {
    const Cell c = layout.cell_of(s);
    EXPECT_EQ(dist[static_cast<std::size_t>(s)],
              oracle_dist[static_cast<std::size_t>(c.row * 13 + c.col)]);
    EXPECT_GE(dist[static_cast<std::size_t>(s)], 0);
  }
}

TEST(ShortestPaths, AllButOneWithinHorizon) {
  const auto dist = shortest_path_distances(four_rooms());
  EXPECT_EQ(std::count_if(dist.begin(), dist.end(), [](int d) { return d <= 20; }), 103);
}
