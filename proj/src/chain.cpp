#include "lac/chain.hpp"

namespace lac {

std::string_view boundary_name(const Boundary& boundary) noexcept {
  switch (boundary.index()) {
    case 0: return "ring";
    case 1: return "zero_halo";
    default: return "truncated";
  }
}

Sensor ChainConfig::halo_depth() const noexcept {
  if (const auto* halo = std::get_if<boundaries::ZeroHalo>(&boundary)) {
    return halo->depth.value_or(static_cast<Sensor>(rounds));
  }
  return 0;
}

}  // namespace lac
