#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bcd4rec {

/// Catalog item identifier, dense in [0, num_items).
using ItemId = std::int32_t;

/// User response to a recommended item. Only `skip` is a negative interaction.
enum class Choice { skip, click, buy };

std::string_view to_string(Choice choice);
/// Accepts "skip"/"click"/"buy"; throws std::invalid_argument otherwise.
Choice choice_from_string(std::string_view label);

inline bool is_positive(Choice choice) { return choice != Choice::skip; }

}  // namespace bcd4rec

namespace bcd4rec {

/// One logged interaction: recommended item, user response, reward.
struct LoggedStep {
  ItemId item = 0;
  Choice choice = Choice::skip;
  double reward = 0.0;

  friend bool operator==(const LoggedStep&, const LoggedStep&) = default;
};

}  // namespace bcd4rec
