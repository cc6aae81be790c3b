#pragma once

#include <string_view>
#include <variant>
#include <vector>

#include "lac/arbitrary_consensus.hpp"
#include "lac/params.hpp"

namespace lac {

namespace algorithms {

struct Exponential {
  Rate rho;
};

/// rho_backward weights x_{i-j}, rho_forward weights x_{i+j}.
struct Asymmetric {
  Rate rho_backward;
  Rate rho_forward;
};

struct Window {
  HalfWidth L;
};

/// Per-sensor half-widths for the real sensors; adjacent entries differ by
/// at most one (cyclically on a ring).
struct VariableWindow {
  std::vector<int> L;
};

struct Arbitrary {
  WeightTable table;
  bool enforce_row_sums = true;
  double tol_K = 1e-9;
};

struct DynExponential {
  Rate rho;
};

struct DynWindow {
  HalfWidth L;
};

}  // namespace algorithms

using AlgorithmSpec =
    std::variant<algorithms::Exponential, algorithms::Asymmetric, algorithms::Window,
                 algorithms::VariableWindow, algorithms::Arbitrary,
                 algorithms::DynExponential, algorithms::DynWindow>;

std::string_view algorithm_name(const AlgorithmSpec& spec) noexcept;

bool is_dynamic(const AlgorithmSpec& spec) noexcept;

/// Largest window half-width in use, 0 for non-window algorithms.
int max_half_width(const AlgorithmSpec& spec) noexcept;

/// |L_i - L_{i+1}| <= 1 for all adjacent pairs; `cyclic` also checks the
/// wrap-around pair.
void validate_window_profile(const std::vector<int>& L, bool cyclic);

}  // namespace lac
