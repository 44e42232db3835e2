#include "bcd4rec/types.hpp"

#include <stdexcept>

namespace bcd4rec {

std::string_view to_string(Choice choice) {
  switch (choice) {
    case Choice::skip: return "skip";
    case Choice::click: return "click";
    case Choice::buy: return "buy";
  }
  return "skip";
}

Choice choice_from_string(std::string_view label) {
  if (label == "skip") return Choice::skip;
  if (label == "click") return Choice::click;
  if (label == "buy") return Choice::buy;
  throw std::invalid_argument("unknown choice label: " + std::string(label));
}

}  // namespace bcd4rec
