#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "lac/field.hpp"

namespace lac {

namespace boundaries {
/// Indices wrap modulo n.
struct Ring {};
/// Ghost sensors with x = 0 run the same algorithm on `depth` extra hops
/// each side. Depth defaults to the round count.
struct ZeroHalo {
  std::optional<Sensor> depth;
};
/// Missing neighbors contribute zero to every term.
struct Truncated {};
}  // namespace boundaries

using Boundary = std::variant<boundaries::Ring, boundaries::ZeroHalo, boundaries::Truncated>;

std::string_view boundary_name(const Boundary& boundary) noexcept;

struct ChainConfig {
  Sensor n = 3;
  Boundary boundary = boundaries::Ring{};
  Round rounds = 0;
  std::uint64_t master_seed = 0;

  bool is_ring() const noexcept { return std::holds_alternative<boundaries::Ring>(boundary); }
  bool is_halo() const noexcept {
    return std::holds_alternative<boundaries::ZeroHalo>(boundary);
  }
  /// Ghost sensors on each side (0 unless zero_halo).
  Sensor halo_depth() const noexcept;
};

}  // namespace lac
