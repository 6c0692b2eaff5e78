#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "arcade/action/command.hpp"
#include "arcade/env/environment.hpp"
#include "arcade/image/frame.hpp"

namespace arcade::practice {

inline constexpr int kSurfaceWidth = 640;
inline constexpr int kSurfaceHeight = 400;
inline constexpr int kActionBudget = 250;
inline constexpr int kGoal = 10;  // targets, levels or mazes per game

namespace palette {
inline constexpr Rgb kBackground{255, 255, 255};
inline constexpr Rgb kTarget{0, 200, 0};
inline constexpr Rgb kMarker{220, 0, 0};
inline constexpr Rgb kPath{0, 0, 0};
inline constexpr Rgb kCursor{0, 0, 0};
inline constexpr Rgb kMovable{200, 200, 200};
inline constexpr Rgb kImmovable{64, 64, 64};
}  // namespace palette

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

/// Progress shared by the three games: a count toward kGoal under a fixed action budget.
struct Tally {
  int completed = 0;
  int actions_used = 0;
  int budget = kActionBudget;

  bool won() const { return completed >= kGoal; }
  bool exhausted() const { return !won() && actions_used >= budget; }
  bool over() const { return won() || exhausted(); }
  bool operator==(const Tally&) const = default;
};

env::Outcome outcome_of(const Tally& tally);

// --- clicking ---------------------------------------------------------------

inline constexpr int kTargetRadius = 40;

struct ClickingState {
  Point target;
  Point cursor;
  Tally tally;
  std::mt19937_64 rng;
  bool operator==(const ClickingState&) const = default;
};

ClickingState clicking_reset(std::uint64_t seed);
/// Pointer moves and drags move the cursor; a left click within kTargetRadius of the target
/// centre scores and respawns it. Every command costs one action.
ClickingState clicking_apply(ClickingState state, const action::ActionCommand& command);
Frame render(const ClickingState& state);

// --- dragging ---------------------------------------------------------------

inline constexpr int kDragTolerance = 12;
inline constexpr int kMarkerRadius = 10;

struct DragLevel {
  std::string label;
  std::vector<Point> waypoints;
  bool operator==(const DragLevel&) const = default;
};

/// Reads the level file format documented in data/drag_paths.txt. Throws std::runtime_error.
std::vector<DragLevel> parse_drag_levels(std::string_view text);
const std::vector<DragLevel>& builtin_drag_levels();

/// Distance from `p` to the polyline, in pixels.
double distance_to_path(const std::vector<Point>& path, double x, double y);

struct DraggingState {
  std::shared_ptr<const std::vector<DragLevel>> levels;
  int level = 0;  // index of the level being played
  Point marker;
  Point cursor;
  int tolerance = kDragTolerance;
  Tally tally;
  bool operator==(const DraggingState&) const;
};

DraggingState dragging_reset(std::shared_ptr<const std::vector<DragLevel>> levels,
                             int tolerance = kDragTolerance);
/// A drag starting within tolerance of the marker carries it along the segment, sampled every
/// pixel. Leaving the path's tolerance band drops the marker back at the path start; reaching
/// the last waypoint clears the level.
DraggingState dragging_apply(DraggingState state, const action::ActionCommand& command);
Frame render(const DraggingState& state);

// --- navigation -------------------------------------------------------------

struct Maze {
  int cols = 0;
  int rows = 0;
  std::vector<bool> open;  // row-major; false = immovable tile
  Point start;             // (column, row)
  Point goal;
  bool movable(int c, int r) const { return c >= 0 && r >= 0 && c < cols && r < rows && open[r * cols + c]; }
  bool operator==(const Maze&) const = default;
};

/// Reads the grid format documented in data/mazes.txt. Throws std::runtime_error.
std::vector<Maze> parse_mazes(std::string_view text);
const std::vector<Maze>& builtin_mazes();
/// Fewest moves from start to goal, or -1 when unreachable.
int shortest_solution(const Maze& maze);

struct NavigationState {
  std::shared_ptr<const std::vector<Maze>> mazes;
  int maze = 0;
  Point player;
  Tally tally;
  bool operator==(const NavigationState&) const;
};

NavigationState navigation_reset(std::shared_ptr<const std::vector<Maze>> mazes);
/// One arrow key held alone moves the player a tile if the destination is movable.
NavigationState navigation_press(NavigationState state, const env::HeldInputs& inputs);
/// Charges one action, then presses each of the command's chords in order.
NavigationState navigation_apply(NavigationState state, const action::ActionCommand& command);
Frame render(const NavigationState& state);

// --- environments -----------------------------------------------------------

/// Environment wrapper shared by the three games. `State` must offer the free functions
/// render(state) and a `tally` member; subclasses supply reset and input handling.
template <typename State>
class PracticeGame : public env::Environment {
 public:
  const State& state() const { return state_; }

  Frame snapshot() const override {
    if (!cached_) cached_ = render(state_);
    return cached_->with_timestamp(elapsed_ms_);
  }
  void advance(std::int64_t dt_ms) override { elapsed_ms_ += dt_ms; }
  action::SurfaceBounds surface_bounds() const override { return action::kDesktopSurface; }
  env::EnvStatus status() const override { return {outcome_of(state_.tally), 0}; }
  std::optional<double> native_progress() const override {
    return static_cast<double>(state_.tally.completed) / kGoal;
  }

 protected:
  Frame restart(State state) {
    elapsed_ms_ = 0;
    set(std::move(state));
    return snapshot();
  }
  void set(State state) {
    state_ = std::move(state);
    cached_.reset();
  }

 private:
  State state_;
  std::int64_t elapsed_ms_ = 0;
  mutable std::optional<Frame> cached_;
};

class ClickingGame final : public PracticeGame<ClickingState> {
 public:
  ClickingGame() { restart(clicking_reset(0)); }
  std::string game_id() const override { return "clicking"; }
  Frame reset(std::uint64_t seed) override { return restart(clicking_reset(seed)); }
  void apply(const action::ActionCommand& command) override { set(clicking_apply(state(), command)); }
};

class DraggingGame final : public PracticeGame<DraggingState> {
 public:
  explicit DraggingGame(std::shared_ptr<const std::vector<DragLevel>> levels = nullptr);
  std::string game_id() const override { return "dragging"; }
  Frame reset(std::uint64_t seed) override;
  void apply(const action::ActionCommand& command) override { set(dragging_apply(state(), command)); }

 private:
  std::shared_ptr<const std::vector<DragLevel>> levels_;
};

/// Moves happen when a chord is pressed, so in realtime mode the player steps at chord start.
class NavigationGame final : public PracticeGame<NavigationState> {
 public:
  explicit NavigationGame(std::shared_ptr<const std::vector<Maze>> mazes = nullptr);
  std::string game_id() const override { return "navigation"; }
  Frame reset(std::uint64_t seed) override;
  void apply(const action::ActionCommand& command) override;
  void press(const env::HeldInputs& inputs) override;

 private:
  std::shared_ptr<const std::vector<Maze>> mazes_;
  bool live_ = false;  // whether the last applied command was charged, so its presses count
};

std::vector<std::string> practice_game_ids();  // "clicking", "dragging", "navigation"
/// Throws std::invalid_argument for unknown ids.
std::unique_ptr<env::Environment> make_practice_game(std::string_view id);

/// Full-state scripted players: the next command that makes progress from `state`.
action::ActionCommand oracle_next(const ClickingState& state);
action::ActionCommand oracle_next(const DraggingState& state);
action::ActionCommand oracle_next(const NavigationState& state);

}  // namespace arcade::practice
