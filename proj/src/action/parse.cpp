#include "arcade/action/parse.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

namespace arcade::action {
namespace {

constexpr double kMaxDurationS = 3600.0;
constexpr int kMaxScroll = 1'000'000;

constexpr std::array<std::string_view, 26> kNamedKeys = {
    "ArrowLeft", "ArrowRight", "ArrowUp",  "ArrowDown", "Enter",   "Escape",   "Backspace",
    "Tab",       "Space",      "Delete",   "Insert",    "Home",    "End",      "PageUp",
    "PageDown",  "CapsLock",   "Control",  "Alt",       "Shift",   "Meta",     "ControlLeft",
    "ControlRight", "AltLeft", "AltRight", "ShiftLeft", "ShiftRight"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

double parse_duration(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value) || value <= 0.0 || value > kMaxDurationS) {
    throw ActionError(ActionErrc::BadDuration, quoted(text));
  }
  return value;
}

std::optional<int> parse_int(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::pair<int, int> parse_point(std::string_view input, const SurfaceBounds& bounds) {
  auto body = trim(input);
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
    body = body.substr(1, body.size() - 2);
  }
  auto parts = split(body, ',');
  if (parts.size() != 2) throw ActionError(ActionErrc::MalformedCoordinates, quoted(input));
  auto x = parse_int(parts[0]);
  auto y = parse_int(parts[1]);
  if (!x || !y) throw ActionError(ActionErrc::MalformedCoordinates, quoted(input));
  if (!bounds.contains(*x, *y)) {
    throw ActionError(ActionErrc::CoordinateOutOfRange,
                      "(" + std::to_string(*x) + "," + std::to_string(*y) + ") outside 0.." +
                          std::to_string(bounds.width) + " x 0.." + std::to_string(bounds.height));
  }
  return {*x, *y};
}

int parse_amount(std::string_view input) {
  auto v = parse_int(input);
  if (!v || *v <= 0 || *v > kMaxScroll) throw ActionError(ActionErrc::BadAmount, quoted(input));
  return *v;
}

std::string require_key(std::string_view token) {
  auto key = trim(token);
  if (key.empty()) throw ActionError(ActionErrc::MalformedKeys, "empty key name");
  if (!is_known_key(key)) throw ActionError(ActionErrc::UnknownKey, quoted(key));
  return std::string(key);
}

// chord := key { "+" key } [ "@" duration ]
template <typename Name, typename Lookup>
auto parse_chord_tokens(std::string_view token, double default_duration, Lookup lookup,
                        ActionErrc duplicate) {
  struct Out {
    std::vector<Name> names;
    double duration;
  } out{{}, default_duration};
  auto at = token.find('@');
  if (at != std::string_view::npos) {
    out.duration = parse_duration(token.substr(at + 1));
    token = token.substr(0, at);
  }
  for (auto part : split(token, '+')) {
    Name name = lookup(part);
    if (std::find(out.names.begin(), out.names.end(), name) != out.names.end()) {
      throw ActionError(duplicate, quoted(trim(part)));
    }
    out.names.push_back(std::move(name));
  }
  return out;
}

KeySequence parse_key_sequence(std::string_view input, const DefaultTimings& timings) {
  if (trim(input).empty()) throw ActionError(ActionErrc::MalformedKeys, "no keys given");
  KeySequence seq;
  for (auto token : split(input, ',')) {
    auto chord = parse_chord_tokens<std::string>(token, timings.key_press_s, require_key,
                                                 ActionErrc::DuplicateKey);
    seq.chords.push_back(KeyChord{std::move(chord.names), chord.duration});
  }
  return seq;
}

Button require_button(std::string_view token) {
  auto name = trim(token);
  if (name.empty()) throw ActionError(ActionErrc::EmptyTuple, "empty button name");
  auto b = button_from_name(name);
  if (!b) throw ActionError(ActionErrc::UnknownButton, quoted(name));
  return *b;
}

ButtonSequence parse_button_line(std::string_view input, const DefaultTimings& timings) {
  ButtonSequence seq;
  if (trim(input).empty()) return seq;
  for (auto token : split(input, ',')) {
    auto chord = parse_chord_tokens<Button>(token, timings.button_press_s, require_button,
                                            ActionErrc::DuplicateButton);
    seq.chords.push_back(ButtonChord{std::move(chord.names), chord.duration});
  }
  return seq;
}

HoldKey parse_hold(std::string_view input, const DefaultTimings& timings) {
  auto parts = split(input, ',');
  if (parts.size() > 2) throw ActionError(ActionErrc::MalformedKeys, quoted(input));
  HoldKey hold;
  hold.key = require_key(parts[0]);
  hold.duration_s = parts.size() == 2 ? parse_duration(parts[1]) : timings.hold_key_s;
  return hold;
}

Click parse_click(std::string_view input) {
  Click click;
  auto body = trim(input);
  if (body.empty()) return click;
  bool saw_left = false;
  bool saw_right = false;
  for (auto part : split(body, '+')) {
    std::string opt(trim(part));
    std::transform(opt.begin(), opt.end(), opt.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (opt == "left") {
      saw_left = true;
    } else if (opt == "right") {
      saw_right = true;
    } else if (opt == "shift") {
      click.modifiers.shift = true;
    } else if (opt == "ctrl") {
      click.modifiers.ctrl = true;
    } else if (opt == "alt") {
      click.modifiers.alt = true;
    } else {
      throw ActionError(ActionErrc::BadClickOption, quoted(trim(part)));
    }
  }
  if (saw_left && saw_right) throw ActionError(ActionErrc::BadClickOption, "left and right");
  click.button = saw_right ? MouseButton::Right : MouseButton::Left;
  return click;
}

Write parse_write(std::string_view input) {
  if (input.empty()) throw ActionError(ActionErrc::BadText, "empty text");
  for (unsigned char c : input) {
    if (c < 0x20 || c == 0x7f) throw ActionError(ActionErrc::BadText, "control character in text");
  }
  return Write{std::string(input)};
}

// --- console list ----------------------------------------------------------

class ListReader {
 public:
  explicit ListReader(std::string_view src) : src_(src) {}

  std::vector<ButtonChord> read(double duration) {
    std::vector<ButtonChord> chords;
    expect('[');
    skip();
    if (peek() == ']') {
      ++pos_;
    } else {
      for (;;) {
        chords.push_back(read_item(duration));
        skip();
        char c = next();
        if (c == ']') break;
        if (c != ',') fail("expected ',' or ']'");
        skip();
        if (peek() == ']') {  // trailing comma
          ++pos_;
          break;
        }
      }
    }
    skip();
    if (pos_ != src_.size()) fail("trailing content after list");
    return chords;
  }

 private:
  ButtonChord read_item(double duration) {
    ButtonChord chord;
    chord.duration_s = duration;
    skip();
    if (peek() == '(') {
      ++pos_;
      skip();
      if (peek() == ')') throw ActionError(ActionErrc::EmptyTuple, "()");
      for (;;) {
        add(chord, read_string());
        skip();
        char c = next();
        if (c == ')') break;
        if (c != ',') fail("expected ',' or ')'");
        skip();
        if (peek() == ')') {
          ++pos_;
          break;
        }
      }
    } else {
      add(chord, read_string());
    }
    return chord;
  }

  static void add(ButtonChord& chord, const std::string& name) {
    auto b = button_from_name(name);
    if (!b) throw ActionError(ActionErrc::UnknownButton, quoted(name));
    if (std::find(chord.buttons.begin(), chord.buttons.end(), *b) != chord.buttons.end()) {
      throw ActionError(ActionErrc::DuplicateButton, quoted(name));
    }
    chord.buttons.push_back(*b);
  }

  std::string read_string() {
    char q = next();
    if (q != '"' && q != '\'') fail("expected a quoted button name");
    auto end = src_.find(q, pos_);
    if (end == std::string_view::npos) fail("unterminated string");
    std::string s(src_.substr(pos_, end - pos_));
    pos_ = end + 1;
    return s;
  }

  void skip() {
    while (pos_ < src_.size()) {
      if (is_space(src_[pos_])) {
        ++pos_;
      } else if (src_[pos_] == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip();
    if (next() != c) fail(std::string("expected '") + c + "'");
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char next() { return pos_ < src_.size() ? src_[pos_++] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ActionError(ActionErrc::MalformedActionList,
                      what + " at offset " + std::to_string(pos_));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace

bool is_known_key(std::string_view name) {
  if (name.size() == 1) return is_upper(name[0]) || is_lower(name[0]) || is_digit(name[0]);
  if (name.size() == 4 && name.substr(0, 3) == "Key") return is_upper(name[3]);
  if (name.size() == 6 && name.substr(0, 5) == "Digit") return is_digit(name[5]);
  if (name.size() >= 2 && name.size() <= 3 && name[0] == 'F' && name[1] != '0' &&
      std::all_of(name.begin() + 1, name.end(), is_digit)) {
    auto n = parse_int(name.substr(1));
    return n && *n <= 12;
  }
  return std::find(kNamedKeys.begin(), kNamedKeys.end(), name) != kNamedKeys.end();
}

ButtonListParse parse_gameboy_actions(std::string_view text, const DefaultTimings& timings) {
  constexpr std::string_view kOpen = "```actions";
  auto open = text.find(kOpen);
  if (open == std::string_view::npos) throw ActionError(ActionErrc::NoActionBlock, "no ```actions fence");
  if (text.find(kOpen, open + kOpen.size()) != std::string_view::npos) {
    throw ActionError(ActionErrc::NoActionBlock, "more than one ```actions fence");
  }
  auto body_start = open + kOpen.size();
  auto close = text.find("```", body_start);
  auto body = text.substr(body_start, close == std::string_view::npos ? std::string_view::npos
                                                                      : close - body_start);
  ButtonListParse out;
  out.chords = ListReader(body).read(timings.button_press_s);
  out.start_select_hazard = std::any_of(out.chords.begin(), out.chords.end(),
                                        [](const ButtonChord& c) { return has_start_select(c); });
  std::string outside(text.substr(0, open));
  if (close != std::string_view::npos) outside += text.substr(close + 3);
  out.outside_text = std::string(trim(outside));
  return out;
}

ActionCommand parse_dos_action(std::string_view action_name, std::string_view action_input,
                               const DefaultTimings& timings, const SurfaceBounds& bounds) {
  auto name = trim(action_name);
  if (name == "click") return parse_click(action_input);
  if (name == "move") {
    auto [x, y] = parse_point(action_input, bounds);
    return MouseMove{x, y};
  }
  if (name == "drag") {
    auto [x, y] = parse_point(action_input, bounds);
    return Drag{x, y};
  }
  if (name == "scroll_up") return ScrollUp{parse_amount(action_input)};
  if (name == "scroll_down") return ScrollDown{parse_amount(action_input)};
  if (name == "write") return parse_write(action_input);
  if (name == "press_key") return parse_key_sequence(action_input, timings);
  if (name == "hold_key") return parse_hold(action_input, timings);
  throw ActionError(ActionErrc::UnknownAction, quoted(name));
}

ActionCommand parse_command(std::string_view line, const DefaultTimings& timings,
                            const SurfaceBounds& bounds) {
  while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  auto sp = line.find(' ');
  auto name = line.substr(0, sp);
  auto input = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
  if (name == "press_buttons") return parse_button_line(input, timings);
  return parse_dos_action(name, input, timings, bounds);
}

std::string_view action_name(const ActionCommand& command) {
  constexpr std::array<std::string_view, std::variant_size_v<ActionCommand>> kNames = {
      "press_buttons", "press_key", "hold_key",    "click", "move",
      "drag",          "scroll_up", "scroll_down", "write"};
  return kNames[command.index()];
}

std::string serialize(const ActionCommand& command, const DefaultTimings& timings) {
  std::string out(action_name(command));
  auto chord_suffix = [](double d, double def) { return d == def ? std::string{} : "@" + format_double(d); };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ButtonSequence>) {
          for (std::size_t i = 0; i < c.chords.size(); ++i) {
            out += i == 0 ? ' ' : ',';
            const auto& chord = c.chords[i];
            for (std::size_t j = 0; j < chord.buttons.size(); ++j) {
              if (j) out += '+';
              out += button_name(chord.buttons[j]);
            }
            out += chord_suffix(chord.duration_s, timings.button_press_s);
          }
        } else if constexpr (std::is_same_v<T, KeySequence>) {
          for (std::size_t i = 0; i < c.chords.size(); ++i) {
            out += i == 0 ? ' ' : ',';
            const auto& chord = c.chords[i];
            for (std::size_t j = 0; j < chord.keys.size(); ++j) {
              if (j) out += '+';
              out += chord.keys[j];
            }
            out += chord_suffix(chord.duration_s, timings.key_press_s);
          }
        } else if constexpr (std::is_same_v<T, HoldKey>) {
          out += ' ' + c.key + ',' + format_double(c.duration_s);
        } else if constexpr (std::is_same_v<T, Click>) {
          std::vector<std::string_view> opts;
          if (c.button == MouseButton::Right) opts.push_back("right");
          if (c.modifiers.shift) opts.push_back("shift");
          if (c.modifiers.ctrl) opts.push_back("ctrl");
          if (c.modifiers.alt) opts.push_back("alt");
          for (std::size_t i = 0; i < opts.size(); ++i) {
            out += i == 0 ? ' ' : '+';
            out += opts[i];
          }
        } else if constexpr (std::is_same_v<T, MouseMove> || std::is_same_v<T, Drag>) {
          out += ' ' + std::to_string(c.x) + ',' + std::to_string(c.y);
        } else if constexpr (std::is_same_v<T, ScrollUp> || std::is_same_v<T, ScrollDown>) {
          out += ' ' + std::to_string(c.amount);
        } else if constexpr (std::is_same_v<T, Write>) {
          out += ' ' + c.text;
        }
      },
      command);
  return out;
}

}  // namespace arcade::action
