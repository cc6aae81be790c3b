#include "lac/algorithm.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace lac {

std::string_view algorithm_name(const AlgorithmSpec& spec) noexcept {
  constexpr std::string_view names[] = {"exponential",    "asymmetric", "window",
                                        "variable_window", "arbitrary",  "dyn_exponential",
                                        "dyn_window"};
  return names[spec.index()];
}

bool is_dynamic(const AlgorithmSpec& spec) noexcept {
  return std::holds_alternative<algorithms::DynExponential>(spec) ||
         std::holds_alternative<algorithms::DynWindow>(spec);
}

int max_half_width(const AlgorithmSpec& spec) noexcept {
  if (const auto* w = std::get_if<algorithms::Window>(&spec)) return w->L.value();
  if (const auto* w = std::get_if<algorithms::DynWindow>(&spec)) return w->L.value();
  if (const auto* w = std::get_if<algorithms::VariableWindow>(&spec)) {
    return w->L.empty() ? 0 : *std::max_element(w->L.begin(), w->L.end());
  }
  return 0;
}

void validate_window_profile(const std::vector<int>& L, bool cyclic) {
  if (L.empty()) fail(ErrorKind::validation, "window profile is empty");
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (L[i] < 1) {
      fail(ErrorKind::validation, "window half-width at sensor " + std::to_string(i) +
                                      " must be >= 1");
    }
  }
  const std::size_t pairs = cyclic ? L.size() : L.size() - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::size_t next = (i + 1) % L.size();
    if (std::abs(L[i] - L[next]) > 1) {
      fail(ErrorKind::validation, "adjacent window half-widths differ by more than one at sensors " +
                                      std::to_string(i) + " and " + std::to_string(next));
    }
  }
}

}  // namespace lac
