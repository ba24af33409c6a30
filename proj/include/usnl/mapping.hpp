#pragma once

#include <cmath>
#include <optional>
#include <string_view>

namespace usnl {

/// Nonnegative mapping from an unconstrained decision parameter to a latent
/// factor value. The set is closed: sigmoid, absolute value, and relu.
enum class MappingKind { Sigmoid, Absolute, Relu };

inline double apply(MappingKind kind, double a) noexcept {
  switch (kind) {
    case MappingKind::Sigmoid:
      // two-branch form; exp() only ever sees a nonpositive argument
      if (a >= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));
      } else {
        const double z = std::exp(a);
        return z / (1.0 + z);
      }
    case MappingKind::Absolute:
      return std::fabs(a);
    case MappingKind::Relu:
      return a > 0.0 ? a : 0.0;
  }
  return 0.0;
}

/// df/da. At a == 0 the nonpositive branch is taken: Absolute gives -1 and
/// Relu gives 0.
inline double derivative(MappingKind kind, double a) noexcept {
  switch (kind) {
    case MappingKind::Sigmoid: {
      const double f = apply(kind, a);
      return f * (1.0 - f);
    }
    case MappingKind::Absolute:
      return a > 0.0 ? 1.0 : -1.0;
    case MappingKind::Relu:
      return a > 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

/// CLI spelling: "sigmoid", "abs", "relu".
std::string_view to_string(MappingKind kind) noexcept;
std::optional<MappingKind> parse_mapping(std::string_view text) noexcept;

}  // namespace usnl
