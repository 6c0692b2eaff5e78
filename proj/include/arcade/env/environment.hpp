#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcade/action/command.hpp"
#include "arcade/image/frame.hpp"

namespace arcade::env {

enum class Outcome : std::uint8_t {
  Running,
  Completed,  // the game itself reports completion
  Locked,     // the game can no longer be played (emulator quit, soft lock)
  Exhausted,  // the game's own action budget ran out
};

struct EnvStatus {
  Outcome outcome = Outcome::Running;
  std::uint32_t losses = 0;  // in-game deaths / game overs since reset
  bool operator==(const EnvStatus&) const = default;
};

/// Inputs held down during one timed segment of a command.
struct HeldInputs {
  std::vector<action::Button> buttons;
  std::vector<std::string> keys;
  bool operator==(const HeldInputs&) const = default;
};

/// Thrown by apply() when a command is invalid for this particular game.
class CommandRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contract implemented by every game, local or remote.
///
/// State changes only through reset(), apply(), press()/release() and advance(). snapshot() has no
/// side effects and advance(0) changes nothing. Implementations are not thread-safe; drivers
/// serialize access.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string game_id() const = 0;

  virtual Frame reset(std::uint64_t seed) = 0;

  /// Delivers one command. Pointer and text commands take effect here; timed inputs are
  /// additionally bracketed by press()/release() while the clock runs.
  virtual void apply(const action::ActionCommand& command) = 0;
  virtual void press(const HeldInputs& /*inputs*/) {}
  virtual void release() {}

  virtual void advance(std::int64_t dt_ms) = 0;

  virtual Frame snapshot() const = 0;
  virtual action::SurfaceBounds surface_bounds() const = 0;
  virtual EnvStatus status() const = 0;

  /// Score computed by the game itself, for games scored without a checkpoint pack.
  virtual std::optional<double> native_progress() const { return std::nullopt; }
};

std::string_view outcome_name(Outcome outcome);

}  // namespace arcade::env
