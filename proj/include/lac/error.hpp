#pragma once

#include <stdexcept>
#include <string>

namespace lac {

enum class ErrorKind {
  validation,          // bad parameter or configuration
  out_of_domain,       // evaluation outside a declared domain
  contract,            // caller broke a precondition (e.g. history too short)
  terminated,          // finite-window algorithm already finished
  diverged,            // non-finite value during simulation
  needs_more_sensors,  // spacing draw too short for the requested tail
  io,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string key = {})
      : std::runtime_error(message), kind_(kind), key_(std::move(key)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Offending configuration key ("section.key"), empty when not config related.
  const std::string& key() const noexcept { return key_; }

 private:
  ErrorKind kind_;
  std::string key_;
};

class DivergedError : public Error {
 public:
  DivergedError(long sensor, int round)
      : Error(ErrorKind::diverged,
              "simulation diverged at sensor " + std::to_string(sensor) +
                  ", round " + std::to_string(round)),
        sensor_(sensor),
        round_(round) {}

  long sensor() const noexcept { return sensor_; }
  int round() const noexcept { return round_; }

 private:
  long sensor_;
  int round_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::string key = {}) {
  throw Error(kind, message, std::move(key));
}

}  // namespace lac
