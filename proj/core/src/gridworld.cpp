#include "disdain/gridworld.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace disdain {

namespace {

constexpr std::string_view kFourRooms =
    "#############\n"
    "#S....#.....#\n"
    "#.....#.....#\n"
    "#...........#\n"
    "#.....#.....#\n"
    "#.....#.....#\n"
    "##.#.##.....#\n"
    "#.....#######\n"
    "#.....#.....#\n"
    "#.....#.....#\n"
    "#...........#\n"
    "#.....#.....#\n"
    "#############\n";

Cell offset(Action a) {
  switch (a) {
    case Action::kLeft: return {0, -1};
    case Action::kRight: return {0, 1};
    case Action::kUp: return {-1, 0};
    case Action::kDown: return {1, 0};
    case Action::kNoop: return {0, 0};
  }
  return {0, 0};
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  auto first = std::find_if(lines.begin(), lines.end(), [](auto l) { return !l.empty(); });
  lines.erase(lines.begin(), first);
  return lines;
}

}  // namespace

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kLeft: return "left";
    case Action::kRight: return "right";
    case Action::kUp: return "up";
    case Action::kDown: return "down";
    case Action::kNoop: return "no-op";
  }
  return "?";
}

bool Layout::walkable(Cell c) const { return state_of(c) >= 0; }

StateId Layout::state_of(Cell c) const {
  if (c.row < 0 || c.col < 0 || c.row >= rows_ || c.col >= cols_) return -1;
  return index_[static_cast<std::size_t>(c.row * cols_ + c.col)];
}

std::string Layout::to_text() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(rows_ * (cols_ + 1)));
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const Cell cell{r, c};
      out += cell == start_ ? 'S' : (walkable(cell) ? '.' : '#');
    }
    out += '\n';
  }
  return out;
}

Layout load_layout(std::string_view map_text, const LayoutRequirements& requirements) {
  const auto lines = split_lines(map_text);
  if (lines.empty()) throw LayoutError("map is empty");

  Layout layout;
  layout.rows_ = static_cast<int>(lines.size());
  layout.cols_ = static_cast<int>(lines.front().size());
  layout.index_.assign(static_cast<std::size_t>(layout.rows_ * layout.cols_), -1);

  int starts = 0;
  for (int r = 0; r < layout.rows_; ++r) {
    const auto line = lines[static_cast<std::size_t>(r)];
    if (static_cast<int>(line.size()) != layout.cols_) {
      std::ostringstream msg;
      msg << "map is not rectangular: row " << r << " has width " << line.size() << ", expected "
          << layout.cols_;
      throw LayoutError(msg.str());
    }
    for (int c = 0; c < layout.cols_; ++c) {
      switch (line[static_cast<std::size_t>(c)]) {
        case '#': break;
        case 'S':
          ++starts;
          layout.start_ = {r, c};
          [[fallthrough]];
        case '.':
          layout.index_[static_cast<std::size_t>(r * layout.cols_ + c)] =
              static_cast<int>(layout.cells_.size());
          layout.cells_.push_back({r, c});
          break;
        default: {
          std::ostringstream msg;
          msg << "unexpected character '" << line[static_cast<std::size_t>(c)] << "' at (" << r
              << "," << c << ")";
          throw LayoutError(msg.str());
        }
      }
    }
  }
  if (starts != 1) {
    throw LayoutError("map must contain exactly one start 'S', found " + std::to_string(starts));
  }

  for (int r = 0; r < layout.rows_; ++r) {
    for (int c = 0; c < layout.cols_; ++c) {
      const bool border = r == 0 || c == 0 || r == layout.rows_ - 1 || c == layout.cols_ - 1;
      if (border && layout.walkable({r, c})) {
        throw LayoutError("outer boundary must be wall; walkable cell at (" + std::to_string(r) +
                          "," + std::to_string(c) + ")");
      }
    }
  }

  if (requirements.walkable_cells >= 0 && layout.num_states() != requirements.walkable_cells) {
    throw LayoutError("walkable cell count " + std::to_string(layout.num_states()) +
                      " != " + std::to_string(requirements.walkable_cells));
  }

  layout.transitions_.resize(static_cast<std::size_t>(layout.num_states()) * kNumActions);
  for (StateId s = 0; s < layout.num_states(); ++s) {
    const Cell from = layout.cell_of(s);
    for (Action a : kAllActions) {
      const Cell d = offset(a);
      const StateId to = layout.state_of({from.row + d.row, from.col + d.col});
      layout.transitions_[static_cast<std::size_t>(s) * kNumActions + static_cast<std::size_t>(a)] =
          to >= 0 ? to : s;
    }
  }

  const auto dist = shortest_path_distances(layout);
  const auto unreachable = std::count(dist.begin(), dist.end(), -1);
  if (unreachable > 0) {
    throw LayoutError(std::to_string(unreachable) + " walkable cells unreachable from start");
  }
  if (requirements.cells_beyond_horizon >= 0) {
    const auto beyond = std::count_if(dist.begin(), dist.end(),
                                      [&](int d) { return d > requirements.horizon; });
    if (beyond != requirements.cells_beyond_horizon) {
      throw LayoutError(std::to_string(beyond) + " cells lie beyond distance " +
                        std::to_string(requirements.horizon) + " from start, expected " +
                        std::to_string(requirements.cells_beyond_horizon));
    }
  }
  return layout;
}

std::string_view four_rooms_map_text() { return kFourRooms; }

const Layout& four_rooms() {
  static const Layout layout = load_layout(kFourRooms);
  return layout;
}

EpisodeState reset(const Layout& layout) { return {layout.start_state(), 0}; }

StepResult step(const Layout& layout, const EpisodeState& state, Action a, int episode_length) {
  if (state.steps_taken >= episode_length) {
    throw std::logic_error("step called on a finished episode");
  }
  EpisodeState next{layout.successor(state.position, a), state.steps_taken + 1};
  return {next, next.steps_taken == episode_length};
}

std::vector<int> shortest_path_distances(const Layout& layout) {
  std::vector<int> dist(static_cast<std::size_t>(layout.num_states()), -1);
  std::deque<StateId> frontier{layout.start_state()};
  dist[static_cast<std::size_t>(layout.start_state())] = 0;
  while (!frontier.empty()) {
    const StateId s = frontier.front();
    frontier.pop_front();
    for (Action a : kAllActions) {
      const StateId n = layout.successor(s, a);
      if (dist[static_cast<std::size_t>(n)] < 0) {
        dist[static_cast<std::size_t>(n)] = dist[static_cast<std::size_t>(s)] + 1;
        frontier.push_back(n);
      }
    }
  }
  return dist;
}

}  // namespace disdain
