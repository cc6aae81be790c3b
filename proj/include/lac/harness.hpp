#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lac/algorithm.hpp"
#include "lac/chain.hpp"
#include "lac/field.hpp"

namespace lac {

/// One delivered message. Indices are in the extended chain (halo sensors
/// are negative or >= n).
struct AuditRecord {
  Round round = 0;
  Sensor receiver = 0;
  Sensor sender = 0;
  std::uint32_t payload = 0;
};

struct ConsensusTrace {
  ChainConfig chain;
  Sensor sensors = 0;
  Round rounds = 0;
  /// y[k * sensors + i] for real sensors i in [0, n), rounds k in [0, rounds].
  std::vector<double> y;
  /// z[(k * sensors + i) * z_width + slot], dynamic window only.
  std::vector<double> z;
  int z_width = 0;
  std::vector<AuditRecord> audit;
  /// Own-history rounds a transition could read; checked by audit_locality.
  int own_history_depth = 0;
  int neighbor_history_depth = 0;

  double at(Sensor i, Round k) const { return y[static_cast<std::size_t>(k) * sensors + i]; }
  double z_at(Sensor i, Round k, int slot) const {
    return z[(static_cast<std::size_t>(k) * sensors + i) * z_width + slot];
  }
};

struct RunOptions {
  bool record_audit = true;
};

/// Synchronous execution: in every round all sensors emit from the same
/// snapshot, messages go only to i-1 and i+1, then all sensors step.
ConsensusTrace run(const ChainConfig& chain, const MeasurementField& field,
                   const AlgorithmSpec& algorithm, RunOptions options = {});

/// Throws validation for chain/algorithm combinations run() would reject.
void validate_run(const ChainConfig& chain, const AlgorithmSpec& algorithm);

/// Audit records whose endpoints are not adjacent, plus one per history
/// depth above three own rounds or two neighbor rounds.
std::size_t audit_locality(const ConsensusTrace& trace);

/// `round,sensor,y` (plus `z0..zL` when present), 17 significant digits.
void write_trace_csv(const ConsensusTrace& trace, std::ostream& out);

}  // namespace lac
