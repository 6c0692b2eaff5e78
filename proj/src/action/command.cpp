#include "arcade/action/command.hpp"

#include <algorithm>
#include <type_traits>

namespace arcade::action {

std::string_view button_name(Button b) {
  switch (b) {
    case Button::A: return "A";
    case Button::B: return "B";
    case Button::Start: return "START";
    case Button::Select: return "SELECT";
    case Button::Up: return "UP";
    case Button::Down: return "DOWN";
    case Button::Left: return "LEFT";
    case Button::Right: return "RIGHT";
  }
  return "?";
}

std::optional<Button> button_from_name(std::string_view name) {
  for (Button b : kAllButtons) {
    if (button_name(b) == name) return b;
  }
  return std::nullopt;
}

bool has_start_select(const ButtonChord& chord) {
  auto has = [&](Button b) {
    return std::find(chord.buttons.begin(), chord.buttons.end(), b) != chord.buttons.end();
  };
  return has(Button::Start) && has(Button::Select);
}

bool has_start_select(const ButtonSequence& seq) {
  return std::any_of(seq.chords.begin(), seq.chords.end(),
                     [](const ButtonChord& c) { return has_start_select(c); });
}

double command_duration_s(const ActionCommand& command) {
  return std::visit(
      [](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ButtonSequence> || std::is_same_v<T, KeySequence>) {
          double total = 0.0;
          for (const auto& chord : c.chords) total += chord.duration_s;
          return total;
        } else if constexpr (std::is_same_v<T, HoldKey>) {
          return c.duration_s;
        } else {
          return 0.0;
        }
      },
      command);
}

std::string_view errc_name(ActionErrc code) {
  switch (code) {
    case ActionErrc::NoActionBlock: return "NoActionBlock";
    case ActionErrc::MalformedActionList: return "MalformedActionList";
    case ActionErrc::UnknownButton: return "UnknownButton";
    case ActionErrc::DuplicateButton: return "DuplicateButton";
    case ActionErrc::EmptyTuple: return "EmptyTuple";
    case ActionErrc::UnknownAction: return "UnknownAction";
    case ActionErrc::UnknownKey: return "UnknownKey";
    case ActionErrc::DuplicateKey: return "DuplicateKey";
    case ActionErrc::MalformedKeys: return "MalformedKeys";
    case ActionErrc::MalformedCoordinates: return "MalformedCoordinates";
    case ActionErrc::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ActionErrc::BadDuration: return "BadDuration";
    case ActionErrc::BadAmount: return "BadAmount";
    case ActionErrc::BadClickOption: return "BadClickOption";
    case ActionErrc::BadText: return "BadText";
  }
  return "Unknown";
}

ActionError::ActionError(ActionErrc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

}  // namespace arcade::action
