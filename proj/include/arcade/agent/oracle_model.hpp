#pragma once

#include <memory>

#include "arcade/agent/model.hpp"
#include "arcade/env/environment.hpp"

namespace arcade::agent {

/// A model that answers with the full-state oracle's next move for a practice game, in the
/// desktop JSON response format. `game` must outlive the client and be a practice game;
/// otherwise std::invalid_argument.
std::unique_ptr<ModelClient> make_oracle_model(const env::Environment& game);

}  // namespace arcade::agent
