#pragma once

#include <string_view>

// Shipped level data, embedded at configure time from data/.
namespace arcade::practice::data {
extern const std::string_view kMazes;
extern const std::string_view kDragPaths;
}  // namespace arcade::practice::data
