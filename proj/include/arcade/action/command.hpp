#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace arcade::action {

/// Console buttons. The vocabulary is closed: these eight names and nothing else.
enum class Button : std::uint8_t { A, B, Start, Select, Up, Down, Left, Right };

inline constexpr Button kAllButtons[] = {Button::A,     Button::B,    Button::Start, Button::Select,
                                         Button::Up,    Button::Down, Button::Left,  Button::Right};

std::string_view button_name(Button b);
std::optional<Button> button_from_name(std::string_view name);

/// Default hold times for presses that do not carry an explicit duration.
struct DefaultTimings {
  double key_press_s = 0.1;
  double button_press_s = 0.5;
  double hold_key_s = 0.5;

  bool operator==(const DefaultTimings&) const = default;
};

/// Pointer coordinates are validated against these inclusive bounds.
struct SurfaceBounds {
  int width = 640;
  int height = 400;

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x <= width && y <= height; }
  bool operator==(const SurfaceBounds&) const = default;
};

inline constexpr SurfaceBounds kDesktopSurface{640, 400};
inline constexpr SurfaceBounds kConsoleSurface{160, 144};

struct ButtonChord {
  std::vector<Button> buttons;  // insertion order, no duplicates
  double duration_s = 0.5;

  bool operator==(const ButtonChord&) const = default;
};

struct KeyChord {
  std::vector<std::string> keys;  // insertion order, no duplicates
  double duration_s = 0.1;

  bool operator==(const KeyChord&) const = default;
};

struct ButtonSequence {
  std::vector<ButtonChord> chords;
  bool operator==(const ButtonSequence&) const = default;
};

struct KeySequence {
  std::vector<KeyChord> chords;
  bool operator==(const KeySequence&) const = default;
};

struct HoldKey {
  std::string key;
  double duration_s = 0.5;
  bool operator==(const HoldKey&) const = default;
};

enum class MouseButton : std::uint8_t { Left, Right };

struct Modifiers {
  bool shift = false;
  bool ctrl = false;
  bool alt = false;
  bool operator==(const Modifiers&) const = default;
};

struct Click {
  MouseButton button = MouseButton::Left;
  Modifiers modifiers;
  bool operator==(const Click&) const = default;
};

struct MouseMove {
  int x = 0;
  int y = 0;
  bool operator==(const MouseMove&) const = default;
};

/// Drag with the left button held from the current pointer position to (x, y).
struct Drag {
  int x = 0;
  int y = 0;
  bool operator==(const Drag&) const = default;
};

struct ScrollUp {
  int amount = 1;
  bool operator==(const ScrollUp&) const = default;
};

struct ScrollDown {
  int amount = 1;
  bool operator==(const ScrollDown&) const = default;
};

struct Write {
  std::string text;
  bool operator==(const Write&) const = default;
};

using ActionCommand = std::variant<ButtonSequence, KeySequence, HoldKey, Click, MouseMove, Drag,
                                   ScrollUp, ScrollDown, Write>;

/// True when a chord presses START and SELECT together, which restarts most handheld emulators.
bool has_start_select(const ButtonChord& chord);
bool has_start_select(const ButtonSequence& seq);

/// Total time the command holds inputs, in seconds. Pointer and text actions are instantaneous.
double command_duration_s(const ActionCommand& command);

enum class ActionErrc {
  NoActionBlock,
  MalformedActionList,
  UnknownButton,
  DuplicateButton,
  EmptyTuple,
  UnknownAction,
  UnknownKey,
  DuplicateKey,
  MalformedKeys,
  MalformedCoordinates,
  CoordinateOutOfRange,
  BadDuration,
  BadAmount,
  BadClickOption,
  BadText,
};

std::string_view errc_name(ActionErrc code);

class ActionError : public std::runtime_error {
 public:
  ActionError(ActionErrc code, const std::string& detail);

  ActionErrc code() const noexcept { return code_; }

 private:
  ActionErrc code_;
};

}  // namespace arcade::action
