#include "usnl/mapping.hpp"

namespace usnl {

std::string_view to_string(MappingKind kind) noexcept {
  switch (kind) {
    case MappingKind::Sigmoid:
      return "sigmoid";
    case MappingKind::Absolute:
      return "abs";
    case MappingKind::Relu:
      return "relu";
  }
  return "unknown";
}

std::optional<MappingKind> parse_mapping(std::string_view text) noexcept {
  if (text == "sigmoid") return MappingKind::Sigmoid;
  if (text == "abs") return MappingKind::Absolute;
  if (text == "relu") return MappingKind::Relu;
  return std::nullopt;
}

}  // namespace usnl
