#pragma once

#include <cmath>
#include <string>

#include "lac/error.hpp"

namespace lac {

/// Decay rate strictly inside (0, 1).
class Rate {
 public:
  explicit Rate(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
      fail(ErrorKind::validation, "rate must lie strictly inside (0,1), got " +
                                      std::to_string(value));
    }
  }

  double value() const noexcept { return value_; }
  /// (1 - rho) / (1 + rho): the scale that passes constant fields unchanged.
  double scale() const noexcept { return (1.0 - value_) / (1.0 + value_); }

  friend bool operator==(Rate, Rate) = default;

 private:
  double value_;
};

/// Window half-width L >= 1 (window length 2L + 1).
class HalfWidth {
 public:
  explicit HalfWidth(int value) : value_(value) {
    if (value < 1) {
      fail(ErrorKind::validation, "window half-width must be >= 1, got " +
                                      std::to_string(value));
    }
  }

  int value() const noexcept { return value_; }
  int length() const noexcept { return 2 * value_ + 1; }
  double weight() const noexcept { return 1.0 / length(); }

  friend bool operator==(HalfWidth, HalfWidth) = default;

 private:
  int value_;
};

}  // namespace lac
