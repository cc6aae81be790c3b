#include "lac/error.hpp"

namespace lac {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::out_of_domain: return "out_of_domain";
    case ErrorKind::contract: return "contract";
    case ErrorKind::terminated: return "terminated";
    case ErrorKind::diverged: return "diverged";
    case ErrorKind::needs_more_sensors: return "needs_more_sensors";
    case ErrorKind::io: return "io";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

}  // namespace lac
