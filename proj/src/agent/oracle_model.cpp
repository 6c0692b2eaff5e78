#include "arcade/agent/oracle_model.hpp"

#include <json.hpp>

#include "arcade/action/parse.hpp"
#include "arcade/practice/games.hpp"

namespace arcade::agent {
namespace {

std::string as_response(const action::ActionCommand& command) {
  const auto line = action::serialize(command);
  const auto space = line.find(' ');
  nlohmann::json doc = {{"thought", "oracle"},
                        {"action", line.substr(0, space)},
                        {"action_input", space == std::string::npos ? "" : line.substr(space + 1)},
                        {"memory", ""}};
  return doc.dump();
}

template <typename Game>
std::unique_ptr<ModelClient> oracle_for(const Game& game) {
  return std::make_unique<CallbackModel>(
      [&game](const std::vector<Message>&) { return as_response(practice::oracle_next(game.state())); });
}

}  // namespace

std::unique_ptr<ModelClient> make_oracle_model(const env::Environment& game) {
  if (auto* g = dynamic_cast<const practice::ClickingGame*>(&game)) return oracle_for(*g);
  if (auto* g = dynamic_cast<const practice::DraggingGame*>(&game)) return oracle_for(*g);
  if (auto* g = dynamic_cast<const practice::NavigationGame*>(&game)) return oracle_for(*g);
  throw std::invalid_argument("no oracle for game \"" + game.game_id() + "\"");
}

}  // namespace arcade::agent
