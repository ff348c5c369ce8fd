#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace disdain {

/// Dense index of a walkable cell. All tabular quantities are keyed by it.
using StateId = int;

enum class Action : std::uint8_t { kLeft = 0, kRight = 1, kUp = 2, kDown = 3, kNoop = 4 };

inline constexpr int kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::kLeft, Action::kRight, Action::kUp, Action::kDown, Action::kNoop};

std::string_view action_name(Action a);

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Thrown by load_layout when the map text is malformed or fails validation.
class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural requirements checked at load time. The defaults describe the
/// Four Rooms world: 104 states, all but one reachable within a 20-step episode.
struct LayoutRequirements {
  int walkable_cells = 104;
  int horizon = 20;
  int cells_beyond_horizon = 1;

  /// Only rectangularity, a single start, closed border and connectivity.
  static LayoutRequirements structural_only() { return {-1, 0, -1}; }
};

/// Immutable grid. Cells are either wall or walkable; walkable cells carry a
/// dense StateId assigned in row-major order. Transitions are precomputed.
class Layout {
 public:
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_states() const { return static_cast<int>(cells_.size()); }

  bool walkable(Cell c) const;
  /// -1 for walls and out-of-grid cells.
  StateId state_of(Cell c) const;
  Cell cell_of(StateId s) const { return cells_.at(static_cast<std::size_t>(s)); }

  Cell start() const { return start_; }
  StateId start_state() const { return state_of(start_); }

  /// Deterministic successor: blocked moves and no-op stay put.
  StateId successor(StateId s, Action a) const {
    return transitions_[static_cast<std::size_t>(s) * kNumActions + static_cast<std::size_t>(a)];
  }

  /// Map text in the load_layout format, 'S' marking the start.
  std::string to_text() const;

 private:
  friend Layout load_layout(std::string_view, const LayoutRequirements&);

  int rows_ = 0;
  int cols_ = 0;
  Cell start_;
  std::vector<int> index_;  // rows*cols, -1 on walls
  std::vector<Cell> cells_;
  std::vector<StateId> transitions_;
};

/// Parses '#' (wall), '.' (walkable) and 'S' (walkable start). Blank leading
/// and trailing lines are ignored; every remaining line must have equal width.
Layout load_layout(std::string_view map_text,
                   const LayoutRequirements& requirements = LayoutRequirements{});

/// The shipped 13x13 Four Rooms map.
std::string_view four_rooms_map_text();
const Layout& four_rooms();

struct EpisodeState {
  StateId position = 0;
  int steps_taken = 0;
  auto operator<=>(const EpisodeState&) const = default;
};

struct StepResult {
  EpisodeState state;
  bool done = false;
};

EpisodeState reset(const Layout& layout);

/// Advances one step. Throws std::logic_error if the episode is already over.
StepResult step(const Layout& layout, const EpisodeState& state, Action a, int episode_length = 20);

/// Breadth-first hop counts from the start under the step movement rule.
/// Unreachable states get -1.
std::vector<int> shortest_path_distances(const Layout& layout);

}  // namespace disdain
