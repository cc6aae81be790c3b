#pragma once

#include <array>
#include <cstddef>

#include "lac/error.hpp"

namespace lac {

/// Fixed-capacity window of the most recent values; `[0]` is the newest.
/// Capacity is part of the type, so a transition taking `Recent<3>` can
/// never see more than three rounds of history.
template <std::size_t Capacity>
class Recent {
 public:
  static constexpr std::size_t capacity = Capacity;

  Recent() = default;

  void push(double value) noexcept {
    for (std::size_t i = Capacity - 1; i > 0; --i) values_[i] = values_[i - 1];
    values_[0] = value;
    if (size_ < Capacity) ++size_;
  }

  void clear() noexcept {
    values_.fill(0.0);
    size_ = 0;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  double operator[](std::size_t age) const {
    if (age >= size_) {
      fail(ErrorKind::contract, "history too short: need age " + std::to_string(age) +
                                    ", have " + std::to_string(size_));
    }
    return values_[age];
  }

  /// Value at `age`, or 0 for ages before the history began.
  double or_zero(std::size_t age) const noexcept {
    return age < size_ ? values_[age] : 0.0;
  }

 private:
  std::array<double, Capacity> values_{};
  std::size_t size_ = 0;
};

using OwnHistory = Recent<3>;
using NeighborHistory = Recent<2>;

}  // namespace lac
