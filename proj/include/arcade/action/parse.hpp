#pragma once

#include <string>
#include <string_view>

#include "arcade/action/command.hpp"

namespace arcade::action {

/// Whether `name` is in the desktop key vocabulary ("KeyA", "Digit1", "ArrowLeft", "Enter",
/// "Control", "F4", single letters and digits, ...).
bool is_known_key(std::string_view name);

struct ButtonListParse {
  std::vector<ButtonChord> chords;
  /// Set when any chord holds START and SELECT at once. Parsing still succeeds.
  bool start_select_hazard = false;
  /// Response text outside the fenced block, trimmed.
  std::string outside_text;
};

/// Parses a console response: exactly one ```actions fenced block holding a bracketed list of
/// quoted button names and parenthesized tuples. `#` starts a comment outside quotes.
ButtonListParse parse_gameboy_actions(std::string_view text, const DefaultTimings& timings = {});

/// Parses one desktop action given as (name, input), e.g. ("press_key", "Control+KeyC").
ActionCommand parse_dos_action(std::string_view action_name, std::string_view action_input,
                               const DefaultTimings& timings = {},
                               const SurfaceBounds& bounds = kDesktopSurface);

/// Parses a single command line in canonical form, e.g. "hold_key A,1.5" or
/// "press_buttons A,B+UP". This is the grammar shared by the CLI, the gateway and the console.
ActionCommand parse_command(std::string_view line, const DefaultTimings& timings = {},
                            const SurfaceBounds& bounds = kDesktopSurface);

/// Canonical single-line form. Durations equal to the matching default are omitted.
/// parse_command(serialize(c, t), t) == c for every valid c.
std::string serialize(const ActionCommand& command, const DefaultTimings& timings = {});

/// Canonical action name ("press_key", "move", ...).
std::string_view action_name(const ActionCommand& command);

}  // namespace arcade::action
