#include "arcade/practice/games.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "arcade/env/driver.hpp"
#include "data.hpp"

namespace arcade::practice {
namespace {

std::int64_t squared_distance(Point a, Point b) {
  const std::int64_t dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

// Pixel positions visited moving from a to b in 1 px steps along the longer axis.
std::vector<Point> sample_segment(Point a, Point b) {
  const std::int64_t dx = b.x - a.x, dy = b.y - a.y;
  const std::int64_t n = std::max(std::abs(dx), std::abs(dy));
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k) {
    if (n == 0) {
      out.push_back(a);
      break;
    }
    out.push_back({static_cast<int>(a.x + floor_div(2 * k * dx + n, 2 * n)),
                   static_cast<int>(a.y + floor_div(2 * k * dy + n, 2 * n))});
  }
  return out;
}

void draw_cursor(Canvas& canvas, Point p) {
  canvas.fill_rect(p.x - 5, p.y, p.x + 6, p.y + 1, palette::kCursor);
  canvas.fill_rect(p.x, p.y - 5, p.x + 1, p.y + 6, palette::kCursor);
}

// Charges one action unless the game has already ended. Returns false when the command must be ignored.
bool charge(Tally& tally) {
  if (tally.over()) return false;
  ++tally.actions_used;
  return true;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

Point spawn_target(std::mt19937_64& rng, std::optional<Point> previous) {
  constexpr auto kSpanX = static_cast<std::uint64_t>(kSurfaceWidth - 2 * kTargetRadius + 1);
  constexpr auto kSpanY = static_cast<std::uint64_t>(kSurfaceHeight - 2 * kTargetRadius + 1);
  for (;;) {
    Point p{kTargetRadius + static_cast<int>(rng() % kSpanX), kTargetRadius + static_cast<int>(rng() % kSpanY)};
    if (!previous || squared_distance(p, *previous) > 4LL * kTargetRadius * kTargetRadius) return p;
  }
}

}  // namespace

env::Outcome outcome_of(const Tally& tally) {
  if (tally.won()) return env::Outcome::Completed;
  if (tally.exhausted()) return env::Outcome::Exhausted;
  return env::Outcome::Running;
}

// --- clicking ---------------------------------------------------------------

ClickingState clicking_reset(std::uint64_t seed) {
  ClickingState s;
  s.rng.seed(seed);
  s.target = spawn_target(s.rng, std::nullopt);
  return s;
}

ClickingState clicking_apply(ClickingState state, const action::ActionCommand& command) {
  if (!charge(state.tally)) return state;
  if (auto* move = std::get_if<action::MouseMove>(&command)) {
    state.cursor = {move->x, move->y};
  } else if (auto* drag = std::get_if<action::Drag>(&command)) {
    state.cursor = {drag->x, drag->y};
  } else if (auto* click = std::get_if<action::Click>(&command)) {
    if (click->button == action::MouseButton::Left &&
        squared_distance(state.cursor, state.target) <= std::int64_t{kTargetRadius} * kTargetRadius) {
      ++state.tally.completed;
      if (!state.tally.won()) state.target = spawn_target(state.rng, state.target);
    }
  }
  return state;
}

Frame render(const ClickingState& state) {
  Canvas canvas(kSurfaceWidth, kSurfaceHeight, palette::kBackground);
  if (!state.tally.won()) canvas.fill_circle(state.target.x, state.target.y, kTargetRadius, palette::kTarget);
  draw_cursor(canvas, state.cursor);
  return canvas.to_frame();
}

// --- dragging ---------------------------------------------------------------

std::vector<DragLevel> parse_drag_levels(std::string_view text) {
  std::vector<DragLevel> levels;
  bool want_points = false;
  for (auto line : lines_of(text)) {
    if (blank(line) || line.front() == '#') continue;
    if (!want_points) {
      std::istringstream in{std::string(line)};
      std::string word;
      int n = 0;
      if (!(in >> word >> n) || word != "level" || n != static_cast<int>(levels.size()) + 1) {
        throw std::runtime_error("expected \"level " + std::to_string(levels.size() + 1) + "\"");
      }
      DragLevel level;
      std::getline(in >> std::ws, level.label);
      levels.push_back(std::move(level));
      want_points = true;
      continue;
    }
    std::istringstream in{std::string(line)};
    std::string token;
    while (in >> token) {
      Point p;
      char comma = 0;
      std::istringstream pt(token);
      if (!(pt >> p.x >> comma >> p.y) || comma != ',' || !pt.eof()) throw std::runtime_error("bad waypoint " + token);
      if (p.x < 0 || p.y < 0 || p.x > kSurfaceWidth || p.y > kSurfaceHeight) {
        throw std::runtime_error("waypoint outside the surface: " + token);
      }
      levels.back().waypoints.push_back(p);
    }
    if (levels.back().waypoints.size() < 2) throw std::runtime_error("a path needs at least two waypoints");
    want_points = false;
  }
  if (want_points) throw std::runtime_error("level without waypoints");
  if (levels.empty()) throw std::runtime_error("no levels");
  return levels;
}

const std::vector<DragLevel>& builtin_drag_levels() {
  static const auto levels = parse_drag_levels(data::kDragPaths);
  return levels;
}

double distance_to_path(const std::vector<Point>& path, double x, double y) {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double ax = path[i].x, ay = path[i].y, bx = path[i + 1].x, by = path[i + 1].y;
    const double vx = bx - ax, vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((x - ax) * vx + (y - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(x - (ax + t * vx), y - (ay + t * vy)));
  }
  return best;
}

bool DraggingState::operator==(const DraggingState& o) const {
  return *levels == *o.levels && level == o.level && marker == o.marker && cursor == o.cursor &&
         tolerance == o.tolerance && tally == o.tally;
}

DraggingState dragging_reset(std::shared_ptr<const std::vector<DragLevel>> levels, int tolerance) {
  if (!levels || levels->size() < static_cast<std::size_t>(kGoal)) {
    throw std::invalid_argument("the dragging game needs ten levels");
  }
  DraggingState s;
  s.levels = std::move(levels);
  s.marker = s.levels->front().waypoints.front();
  s.tolerance = tolerance;
  return s;
}

DraggingState dragging_apply(DraggingState state, const action::ActionCommand& command) {
  if (!charge(state.tally)) return state;
  if (auto* move = std::get_if<action::MouseMove>(&command)) {
    state.cursor = {move->x, move->y};
    return state;
  }
  auto* drag = std::get_if<action::Drag>(&command);
  if (!drag) return state;

  const Point from = state.cursor;
  const Point to{drag->x, drag->y};
  state.cursor = to;
  const auto tol2 = std::int64_t{state.tolerance} * state.tolerance;
  if (squared_distance(from, state.marker) > tol2) return state;  // nothing grabbed

  const Point offset{state.marker.x - from.x, state.marker.y - from.y};
  const auto& path = (*state.levels)[static_cast<std::size_t>(state.level)].waypoints;
  for (Point p : sample_segment(from, to)) {
    const Point m{p.x + offset.x, p.y + offset.y};
    if (distance_to_path(path, m.x, m.y) > state.tolerance) {
      state.marker = path.front();
      return state;
    }
    state.marker = m;
    if (squared_distance(m, path.back()) <= tol2) {
      ++state.tally.completed;
      if (!state.tally.won()) {
        ++state.level;
        state.marker = (*state.levels)[static_cast<std::size_t>(state.level)].waypoints.front();
      }
      return state;
    }
  }
  return state;
}

Frame render(const DraggingState& state) {
  Canvas canvas(kSurfaceWidth, kSurfaceHeight, palette::kBackground);
  const auto& path = (*state.levels)[static_cast<std::size_t>(state.level)].waypoints;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    canvas.draw_line(path[i].x, path[i].y, path[i + 1].x, path[i + 1].y, 3, palette::kPath);
  }
  canvas.fill_circle(path.back().x, path.back().y, kMarkerRadius + 2, palette::kTarget);
  canvas.fill_circle(state.marker.x, state.marker.y, kMarkerRadius, palette::kMarker);
  draw_cursor(canvas, state.cursor);
  return canvas.to_frame();
}

DraggingGame::DraggingGame(std::shared_ptr<const std::vector<DragLevel>> levels)
    : levels_(levels ? std::move(levels) : std::make_shared<const std::vector<DragLevel>>(builtin_drag_levels())) {
  restart(dragging_reset(levels_));
}

Frame DraggingGame::reset(std::uint64_t /*seed*/) { return restart(dragging_reset(levels_)); }

// --- navigation -------------------------------------------------------------

std::vector<Maze> parse_mazes(std::string_view text) {
  std::vector<Maze> mazes;
  std::vector<std::string_view> grid;
  bool in_maze = false;
  auto finish = [&] {
    if (!in_maze) return;
    in_maze = false;
    if (grid.empty()) throw std::runtime_error("empty maze");
    Maze m;
    m.rows = static_cast<int>(grid.size());
    m.cols = static_cast<int>(grid.front().size());
    int starts = 0, goals = 0;
    for (int r = 0; r < m.rows; ++r) {
      if (static_cast<int>(grid[r].size()) != m.cols) throw std::runtime_error("ragged maze rows");
      for (int c = 0; c < m.cols; ++c) {
        const char ch = grid[r][c];
        if (ch != '#' && ch != '.' && ch != 'S' && ch != 'G') throw std::runtime_error("bad maze tile");
        m.open.push_back(ch != '#');
        if (ch == 'S') m.start = {c, r}, ++starts;
        if (ch == 'G') m.goal = {c, r}, ++goals;
      }
    }
    if (starts != 1 || goals != 1) throw std::runtime_error("a maze needs exactly one S and one G");
    mazes.push_back(std::move(m));
    grid.clear();
  };
  for (auto line : lines_of(text)) {
    if (in_maze) {
      if (blank(line)) {
        finish();
      } else {
        grid.push_back(line);
      }
      continue;
    }
    if (blank(line) || line.front() == '#') continue;
    if (line != "maze " + std::to_string(mazes.size() + 1)) {
      throw std::runtime_error("expected \"maze " + std::to_string(mazes.size() + 1) + "\"");
    }
    in_maze = true;
  }
  finish();
  if (mazes.empty()) throw std::runtime_error("no mazes");
  return mazes;
}

const std::vector<Maze>& builtin_mazes() {
  static const auto mazes = parse_mazes(data::kMazes);
  return mazes;
}

namespace {

constexpr Point kSteps[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// Breadth-first distances from `from`; -1 where unreachable.
std::vector<int> distances(const Maze& maze, Point from) {
  std::vector<int> dist(maze.open.size(), -1);
  std::deque<Point> queue{from};
  dist[from.y * maze.cols + from.x] = 0;
  while (!queue.empty()) {
    auto p = queue.front();
    queue.pop_front();
    for (auto s : kSteps) {
      Point n{p.x + s.x, p.y + s.y};
      if (maze.movable(n.x, n.y) && dist[n.y * maze.cols + n.x] < 0) {
        dist[n.y * maze.cols + n.x] = dist[p.y * maze.cols + p.x] + 1;
        queue.push_back(n);
      }
    }
  }
  return dist;
}

std::optional<Point> arrow_step(const env::HeldInputs& inputs) {
  if (!inputs.buttons.empty() || inputs.keys.size() != 1) return std::nullopt;
  const auto& k = inputs.keys.front();
  if (k == "ArrowRight") return Point{1, 0};
  if (k == "ArrowDown") return Point{0, 1};
  if (k == "ArrowLeft") return Point{-1, 0};
  if (k == "ArrowUp") return Point{0, -1};
  return std::nullopt;
}

}  // namespace

int shortest_solution(const Maze& maze) { return distances(maze, maze.start)[maze.goal.y * maze.cols + maze.goal.x]; }

bool NavigationState::operator==(const NavigationState& o) const {
  return *mazes == *o.mazes && maze == o.maze && player == o.player && tally == o.tally;
}

NavigationState navigation_reset(std::shared_ptr<const std::vector<Maze>> mazes) {
  if (!mazes || mazes->size() < static_cast<std::size_t>(kGoal)) {
    throw std::invalid_argument("the navigation game needs ten mazes");
  }
  NavigationState s;
  s.mazes = std::move(mazes);
  s.player = s.mazes->front().start;
  return s;
}

NavigationState navigation_press(NavigationState state, const env::HeldInputs& inputs) {
  if (state.tally.won()) return state;
  auto step = arrow_step(inputs);
  if (!step) return state;
  const auto& maze = (*state.mazes)[static_cast<std::size_t>(state.maze)];
  const Point next{state.player.x + step->x, state.player.y + step->y};
  if (!maze.movable(next.x, next.y)) return state;
  state.player = next;
  if (next == maze.goal) {
    ++state.tally.completed;
    if (!state.tally.won()) {
      ++state.maze;
      state.player = (*state.mazes)[static_cast<std::size_t>(state.maze)].start;
    }
  }
  return state;
}

NavigationState navigation_apply(NavigationState state, const action::ActionCommand& command) {
  if (!charge(state.tally)) return state;
  for (const auto& seg : env::segments_of(command)) state = navigation_press(std::move(state), seg.inputs);
  return state;
}

Frame render(const NavigationState& state) {
  Canvas canvas(kSurfaceWidth, kSurfaceHeight, palette::kBackground);
  const auto& maze = (*state.mazes)[static_cast<std::size_t>(state.maze)];
  const int cell = std::min({60, (kSurfaceWidth - 40) / maze.cols, (kSurfaceHeight - 40) / maze.rows});
  const int left = (kSurfaceWidth - cell * maze.cols) / 2;
  const int top = (kSurfaceHeight - cell * maze.rows) / 2;
  auto tile = [&](Point p, int inset, Rgb colour) {
    canvas.fill_rect(left + p.x * cell + inset, top + p.y * cell + inset, left + (p.x + 1) * cell - inset,
                     top + (p.y + 1) * cell - inset, colour);
  };
  for (int r = 0; r < maze.rows; ++r) {
    for (int c = 0; c < maze.cols; ++c) tile({c, r}, 1, maze.movable(c, r) ? palette::kMovable : palette::kImmovable);
  }
  const int inset = cell / 6;
  tile(maze.goal, inset, palette::kTarget);
  tile(state.player, inset, palette::kMarker);
  return canvas.to_frame();
}

NavigationGame::NavigationGame(std::shared_ptr<const std::vector<Maze>> mazes)
    : mazes_(mazes ? std::move(mazes) : std::make_shared<const std::vector<Maze>>(builtin_mazes())) {
  restart(navigation_reset(mazes_));
}

Frame NavigationGame::reset(std::uint64_t /*seed*/) { return restart(navigation_reset(mazes_)); }

void NavigationGame::apply(const action::ActionCommand& /*command*/) {
  auto s = state();
  live_ = charge(s.tally);
  set(std::move(s));
}

void NavigationGame::press(const env::HeldInputs& inputs) {
  if (live_) set(navigation_press(state(), inputs));
}

// --- registry and oracles ----------------------------------------------------

std::vector<std::string> practice_game_ids() { return {"clicking", "dragging", "navigation"}; }

std::unique_ptr<env::Environment> make_practice_game(std::string_view id) {
  if (id == "clicking") return std::make_unique<ClickingGame>();
  if (id == "dragging") return std::make_unique<DraggingGame>();
  if (id == "navigation") return std::make_unique<NavigationGame>();
  throw std::invalid_argument("unknown practice game \"" + std::string(id) + "\"");
}

action::ActionCommand oracle_next(const ClickingState& state) {
  if (state.cursor != state.target) return action::MouseMove{state.target.x, state.target.y};
  return action::Click{};
}

action::ActionCommand oracle_next(const DraggingState& state) {
  if (state.cursor != state.marker) return action::MouseMove{state.marker.x, state.marker.y};
  const auto& path = (*state.levels)[static_cast<std::size_t>(state.level)].waypoints;
  // Aim for the end of the last segment the marker sits on.
  std::size_t next = 1;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (distance_to_path({path[i], path[i + 1]}, state.marker.x, state.marker.y) < 0.5) next = i + 1;
  }
  return action::Drag{path[next].x, path[next].y};
}

action::ActionCommand oracle_next(const NavigationState& state) {
  const auto& maze = (*state.mazes)[static_cast<std::size_t>(state.maze)];
  const auto dist = distances(maze, maze.goal);
  static constexpr const char* kNames[] = {"ArrowRight", "ArrowDown", "ArrowLeft", "ArrowUp"};
  const int here = dist[state.player.y * maze.cols + state.player.x];
  for (int i = 0; i < 4; ++i) {
    Point n{state.player.x + kSteps[i].x, state.player.y + kSteps[i].y};
    if (maze.movable(n.x, n.y) && dist[n.y * maze.cols + n.x] == here - 1) {
      return action::KeySequence{{action::KeyChord{{kNames[i]}, 0.1}}};
    }
  }
  return action::KeySequence{{action::KeyChord{{"ArrowRight"}, 0.1}}};
}

}  // namespace arcade::practice
