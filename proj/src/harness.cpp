#include "lac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include <fmt/format.h>

#include "lac/dynamic_consensus.hpp"
#include "lac/static_consensus.hpp"

namespace lac {
namespace {

enum Side : int { backward = 0, forward = 1 };

constexpr Round kNever = std::numeric_limits<Round>::max() - 1;

/// Private memory and behavior of one sensor. The harness is the only thing
/// that moves data between sensors.
class Node {
 public:
  virtual ~Node() = default;
  virtual void start(double x0) = 0;
  /// Emits a message in round k.
  virtual bool sends(Round k) const { return k <= final_round(); }
  /// Produces round k + 1.
  virtual bool steps(Round k) const { return k + 1 <= final_round(); }
  virtual Round final_round() const { return kNever; }
  virtual std::size_t payload_size() const { return 1; }
  virtual void emit(Side toward, std::span<double> payload) const = 0;
  virtual void deliver(Side from, std::span<const double> payload) = 0;
  virtual void step(Round k, double x_next) = 0;
  virtual double consensus() const = 0;
  virtual std::span<const double> slots() const { return {}; }
};

// Exponential, asymmetric and (variable) window schemes: a scalar state
// propagated by a Policy providing init() / next() / final_round().
template <class Policy>
class PropagationNode final : public Node {
 public:
  explicit PropagationNode(Policy policy) : policy_(std::move(policy)) {}

  void start(double x0) override { own_.push(policy_.init(x0)); }
  Round final_round() const override { return policy_.final_round(); }
  void emit(Side, std::span<double> payload) const override { payload[0] = own_[0]; }
  void deliver(Side from, std::span<const double> payload) override {
    (from == backward ? left_ : right_).push(payload[0]);
  }
  void step(Round k, double) override { own_.push(policy_.next(k, own_, left_, right_)); }
  double consensus() const override { return own_[0]; }

 private:
  Policy policy_;
  OwnHistory own_;
  NeighborHistory left_;
  NeighborHistory right_;
};

struct ExpPolicy {
  Rate rho;
  double init(double x) const { return exp_initial(x, rho); }
  double next(Round k, const OwnHistory& o, const NeighborHistory& l,
              const NeighborHistory& r) const {
    return exp_transition(k, o, l, r, rho);
  }
  Round final_round() const { return kNever; }
};

struct AsymPolicy {
  Rate backward_rate;
  Rate forward_rate;
  double init(double x) const { return asym_initial(x, backward_rate, forward_rate); }
  double next(Round k, const OwnHistory& o, const NeighborHistory& l,
              const NeighborHistory& r) const {
    return asym_transition(k, o, l, r, backward_rate, forward_rate);
  }
  Round final_round() const { return kNever; }
};

struct WindowPolicy {
  HalfWidth L;
  HalfWidth L_left;
  HalfWidth L_right;
  double init(double x) const { return window_initial(x, L); }
  double next(Round k, const OwnHistory& o, const NeighborHistory& l,
              const NeighborHistory& r) const {
    return variable_window_transition(k, o, l, r, L, L_left, L_right);
  }
  Round final_round() const { return L.value(); }
};

class ForwardBackwardNode final : public Node {
 public:
  explicit ForwardBackwardNode(LocalWeights weights) : weights_(weights) {}

  void start(double x0) override {
    x_ = x0;
    state_ = fb_initial(x0, weights_);
  }
  // Sensor i - 1 accumulates forward sums and needs y^F_i; sensor i + 1 needs y^B_i.
  void emit(Side toward, std::span<double> payload) const override {
    payload[0] = toward == backward ? state_.forward : state_.backward;
  }
  void deliver(Side from, std::span<const double> payload) override {
    (from == forward ? forward_neighbor_ : backward_neighbor_).push(payload[0]);
  }
  void step(Round k, double) override {
    state_ = fb_transition(k, state_, forward_neighbor_, backward_neighbor_, weights_);
  }
  double consensus() const override { return glue(state_, x_, weights_); }

 private:
  LocalWeights weights_;
  double x_ = 0.0;
  FBState state_;
  NeighborHistory forward_neighbor_;
  NeighborHistory backward_neighbor_;
};

class DynExpNode final : public Node {
 public:
  explicit DynExpNode(Rate rho) : rho_(rho) {}

  void start(double x0) override {
    x_.push(x0);
    own_.push(dyn_exp_initial(x0, rho_));
  }
  void emit(Side, std::span<double> payload) const override { payload[0] = own_[0]; }
  void deliver(Side from, std::span<const double> payload) override {
    (from == backward ? left_ : right_).push(payload[0]);
  }
  void step(Round k, double x_next) override {
    x_.push(x_next);
    own_.push(dyn_exp_transition(k, own_, left_, right_, x_, rho_));
  }
  double consensus() const override { return own_[0]; }

 private:
  Rate rho_;
  OwnHistory own_;
  NeighborHistory left_;
  NeighborHistory right_;
  MeasurementHistory x_;
};

class DynWindowNode final : public Node {
 public:
  explicit DynWindowNode(HalfWidth L)
      : L_(L),
        width_(static_cast<std::size_t>(L.value() + 1)),
        own_(width_),
        left_(width_),
        right_(width_),
        current_(width_, 0.0),
        previous_(width_, 0.0) {}

  void start(double x0) override {
    for (std::size_t s = 0; s < width_; ++s) {
      own_[s].push(z_slot_initial(static_cast<int>(s), x0, L_));
      current_[s] = own_[s][0];
    }
    y_ = assemble_y(current_, previous_, 0, L_);
  }
  std::size_t payload_size() const override { return width_; }
  void emit(Side, std::span<double> payload) const override {
    std::copy(current_.begin(), current_.end(), payload.begin());
  }
  void deliver(Side from, std::span<const double> payload) override {
    auto& target = from == backward ? left_ : right_;
    for (std::size_t s = 0; s < width_; ++s) target[s].push(payload[s]);
  }
  void step(Round k, double x_next) override {
    previous_ = current_;
    for (std::size_t s = 0; s < width_; ++s) {
      own_[s].push(
          z_slot_transition(k, static_cast<int>(s), own_[s], left_[s], right_[s], x_next, L_));
      current_[s] = own_[s][0];
    }
    y_ = assemble_y(current_, previous_, k + 1, L_);
  }
  double consensus() const override { return y_; }
  std::span<const double> slots() const override { return current_; }

 private:
  HalfWidth L_;
  std::size_t width_;
  std::vector<OwnHistory> own_;
  std::vector<NeighborHistory> left_;
  std::vector<NeighborHistory> right_;
  std::vector<double> current_;
  std::vector<double> previous_;
  double y_ = 0.0;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

/// Extended chain geometry: real sensors [0, n), halo sensors outside.
struct Geometry {
  Sensor n;
  Sensor depth;
  bool ring;

  Sensor first() const { return -depth; }
  Sensor last() const { return n + depth - 1; }
  Sensor count() const { return n + 2 * depth; }
  std::size_t slot(Sensor e) const { return static_cast<std::size_t>(e + depth); }
  bool real(Sensor e) const { return e >= 0 && e < n; }

  /// Neighbor of e on `side`, or nullopt when the chain ends there.
  std::optional<Sensor> neighbor(Sensor e, Side side) const {
    const Sensor candidate = side == backward ? e - 1 : e + 1;
    if (ring) return ((candidate % n) + n) % n;
    if (candidate < first() || candidate > last()) return std::nullopt;
    return candidate;
  }
  /// Real sensor whose per-sensor parameters a halo sensor reuses.
  Sensor parameter_index(Sensor e) const {
    if (ring) return ((e % n) + n) % n;
    return std::clamp<Sensor>(e, 0, n - 1);
  }
};

std::unique_ptr<Node> make_node(const AlgorithmSpec& algorithm, const Geometry& g, Sensor e) {
  return std::visit(
      overloaded{
          [](const algorithms::Exponential& a) -> std::unique_ptr<Node> {
            return std::make_unique<PropagationNode<ExpPolicy>>(ExpPolicy{a.rho});
          },
          [](const algorithms::Asymmetric& a) -> std::unique_ptr<Node> {
            return std::make_unique<PropagationNode<AsymPolicy>>(
                AsymPolicy{a.rho_backward, a.rho_forward});
          },
          [](const algorithms::Window& a) -> std::unique_ptr<Node> {
            return std::make_unique<PropagationNode<WindowPolicy>>(WindowPolicy{a.L, a.L, a.L});
          },
          [&](const algorithms::VariableWindow& a) -> std::unique_ptr<Node> {
            auto half_width = [&](Sensor s) {
              return HalfWidth(a.L[static_cast<std::size_t>(g.parameter_index(s))]);
            };
            return std::make_unique<PropagationNode<WindowPolicy>>(
                WindowPolicy{half_width(e), half_width(e - 1), half_width(e + 1)});
          },
          [&](const algorithms::Arbitrary& a) -> std::unique_ptr<Node> {
            LocalWeights weights{&a.table, g.parameter_index(e), g.parameter_index(e + 1),
                                 g.parameter_index(e - 1)};
            return std::make_unique<ForwardBackwardNode>(weights);
          },
          [](const algorithms::DynExponential& a) -> std::unique_ptr<Node> {
            return std::make_unique<DynExpNode>(a.rho);
          },
          [](const algorithms::DynWindow& a) -> std::unique_ptr<Node> {
            return std::make_unique<DynWindowNode>(a.L);
          },
      },
      algorithm);
}

int own_depth(const AlgorithmSpec& algorithm) {
  return std::holds_alternative<algorithms::Arbitrary>(algorithm) ? 1
                                                                  : static_cast<int>(OwnHistory::capacity);
}

}  // namespace

void validate_run(const ChainConfig& chain, const AlgorithmSpec& algorithm) {
  if (chain.n < 3) fail(ErrorKind::validation, "chain needs at least 3 sensors", "chain.n");
  if (chain.rounds < 0) fail(ErrorKind::validation, "rounds must be >= 0", "chain.rounds");
  const int L = max_half_width(algorithm);
  if (chain.is_ring() && chain.n < 2 * static_cast<Sensor>(L) + 1) {
    fail(ErrorKind::validation,
         "ring of " + std::to_string(chain.n) + " sensors is shorter than the window 2L+1 = " +
             std::to_string(2 * L + 1),
         "chain.n");
  }
  if (const auto* halo = std::get_if<boundaries::ZeroHalo>(&chain.boundary)) {
    if (halo->depth && *halo->depth < chain.rounds) {
      fail(ErrorKind::validation, "halo depth must be >= rounds", "chain.halo_depth");
    }
  }
  if (const auto* vw = std::get_if<algorithms::VariableWindow>(&algorithm)) {
    if (static_cast<Sensor>(vw->L.size()) != chain.n) {
      fail(ErrorKind::validation, "window profile length must equal the sensor count",
           "algorithm.L_profile");
    }
    validate_window_profile(vw->L, chain.is_ring());
  }
  if (const auto* arb = std::get_if<algorithms::Arbitrary>(&algorithm)) {
    if (chain.is_ring() && chain.n < 2 * static_cast<Sensor>(arb->table.radius()) + 1) {
      fail(ErrorKind::validation, "ring shorter than the weight band 2R+1", "algorithm.radius");
    }
    if (arb->table.sensors() != chain.n) {
      fail(ErrorKind::validation, "weight table must have one row per sensor", "algorithm.weights");
    }
    const WeightReport report =
        validate_weights(arb->table, arb->enforce_row_sums ? arb->tol_K
                                                           : std::numeric_limits<double>::infinity());
    if (!report.ok) {
      fail(ErrorKind::validation,
           "weight table violates the normalization assumption at sensor " +
               std::to_string(report.issues.front().sensor) + " (row sum " +
               fmt::format("{:.17g}", report.issues.front().row_sum) + ")",
           "algorithm.weights");
    }
  }
}

ConsensusTrace run(const ChainConfig& chain, const MeasurementField& field,
                   const AlgorithmSpec& algorithm, RunOptions options) {
  field.validate();
  validate_run(chain, algorithm);

  const Geometry g{chain.n, chain.halo_depth(), chain.is_ring()};
  const bool dynamic = is_dynamic(algorithm);

  std::vector<std::unique_ptr<Node>> nodes;
  nodes.reserve(static_cast<std::size_t>(g.count()));
  for (Sensor e = g.first(); e <= g.last(); ++e) nodes.push_back(make_node(algorithm, g, e));

  ConsensusTrace trace;
  trace.chain = chain;
  trace.sensors = chain.n;
  trace.rounds = chain.rounds;
  trace.own_history_depth = own_depth(algorithm);
  trace.neighbor_history_depth = static_cast<int>(NeighborHistory::capacity);
  trace.y.assign(static_cast<std::size_t>(chain.rounds + 1) * chain.n, 0.0);
  const std::size_t payload = nodes.front()->payload_size();
  if (std::holds_alternative<algorithms::DynWindow>(algorithm)) {
    trace.z_width = static_cast<int>(payload);
    trace.z.assign(trace.y.size() * payload, 0.0);
  }
  if (options.record_audit) trace.audit.reserve(static_cast<std::size_t>(chain.rounds) * g.count() * 2);

  auto measurement = [&](Sensor e, Round k) { return g.real(e) ? evaluate_field(field, e, k) : 0.0; };

  auto record = [&](Round k) {
    for (Sensor e = g.first(); e <= g.last(); ++e) {
      const double y = nodes[g.slot(e)]->consensus();
      if (!std::isfinite(y)) throw DivergedError(e, k);
      if (!g.real(e)) continue;
      trace.y[static_cast<std::size_t>(k) * chain.n + e] = y;
      if (trace.z_width > 0) {
        const auto z = nodes[g.slot(e)]->slots();
        std::copy(z.begin(), z.end(),
                  trace.z.begin() + static_cast<std::ptrdiff_t>(
                                        (static_cast<std::size_t>(k) * chain.n + e) * payload));
      }
    }
  };

  for (Sensor e = g.first(); e <= g.last(); ++e) nodes[g.slot(e)]->start(measurement(e, 0));
  record(0);

  // outbox[(slot * 2 + side) * payload]: message slot sends toward `side`.
  std::vector<double> outbox(static_cast<std::size_t>(g.count()) * 2 * payload, 0.0);
  const std::vector<double> silence(payload, 0.0);
  auto outgoing = [&](Sensor e, Side toward) {
    return std::span<double>(outbox).subspan((g.slot(e) * 2 + toward) * payload, payload);
  };

  for (Round k = 0; k < chain.rounds; ++k) {
    for (Sensor e = g.first(); e <= g.last(); ++e) {
      const Node& node = *nodes[g.slot(e)];
      if (!node.sends(k)) continue;
      node.emit(backward, outgoing(e, backward));
      node.emit(forward, outgoing(e, forward));
    }
    for (Sensor e = g.first(); e <= g.last(); ++e) {
      Node& node = *nodes[g.slot(e)];
      if (!node.steps(k)) continue;
      for (Side from : {backward, forward}) {
        const auto sender = g.neighbor(e, from);
        if (!sender) {
          node.deliver(from, silence);
          continue;
        }
        if (!nodes[g.slot(*sender)]->sends(k)) {
          fail(ErrorKind::contract, "sensor " + std::to_string(e) + " needs a message from " +
                                        std::to_string(*sender) + " in round " +
                                        std::to_string(k) + " but that sensor is silent");
        }
        node.deliver(from, outgoing(*sender, from == backward ? forward : backward));
        if (options.record_audit) {
          trace.audit.push_back({k, e, *sender, static_cast<std::uint32_t>(payload)});
        }
      }
    }
    for (Sensor e = g.first(); e <= g.last(); ++e) {
      Node& node = *nodes[g.slot(e)];
      if (!node.steps(k)) continue;
      node.step(k, dynamic ? measurement(e, k + 1) : 0.0);
    }
    record(k + 1);
  }
  return trace;
}

std::size_t audit_locality(const ConsensusTrace& trace) {
  std::size_t violations = 0;
  const Sensor n = trace.sensors;
  const bool ring = trace.chain.is_ring();
  for (const auto& r : trace.audit) {
    const Sensor d = r.receiver - r.sender;
    const bool adjacent = ring ? (((d % n) + n) % n == 1 || ((d % n) + n) % n == n - 1)
                               : (d == 1 || d == -1);
    const std::uint32_t expected = trace.z_width > 0 ? static_cast<std::uint32_t>(trace.z_width) : 1;
    if (!adjacent || r.payload != expected) ++violations;
  }
  if (trace.own_history_depth > 3) ++violations;
  if (trace.neighbor_history_depth > 2) ++violations;
  return violations;
}

void write_trace_csv(const ConsensusTrace& trace, std::ostream& out) {
  out << "round,sensor,y";
  for (int s = 0; s < trace.z_width; ++s) out << ",z" << s;
  out << '\n';
  fmt::memory_buffer line;
  for (Round k = 0; k <= trace.rounds; ++k) {
    for (Sensor i = 0; i < trace.sensors; ++i) {
      line.clear();
      fmt::format_to(std::back_inserter(line), "{},{},{:.17g}", k, i, trace.at(i, k));
      for (int s = 0; s < trace.z_width; ++s) {
        fmt::format_to(std::back_inserter(line), ",{:.17g}", trace.z_at(i, k, s));
      }
      line.push_back('\n');
      out.write(line.data(), static_cast<std::streamsize>(line.size()));
    }
  }
}

}  // namespace lac
