#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace squeezecav {

enum class ErrorKind {
    Domain,                 // argument outside the modeled range
    UndefinedCorrelation,   // g2 requested where <n> = 0
    SingularPhase,          // phase equation diverges at sinh(u) = 0 off resonance
    IntegrationOverflow,    // state left double range during strong pumping
    NoSteadyState,          // g >= 1
    NotReached,             // threshold target not crossed before tau_end
    Truncation,             // Fock basis too small
    Invariant,              // a checked numerical invariant was violated
    Size,                   // bad matrix dimension
    Config,                 // run configuration rejected
    Io,                     // file system failure
};

const char *to_string(ErrorKind kind);

/// Single exception type for the library. `kind` classifies the failure;
/// `tau` carries the dimensionless time at which an integration failed and
/// `value` an associated quantity (last dX, <n>, ...) when one is meaningful.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &what, std::optional<double> tau = std::nullopt,
          std::optional<double> value = std::nullopt)
        : std::runtime_error(what), kind_(kind), tau_(tau), value_(value) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<double> tau() const noexcept { return tau_; }
    std::optional<double> value() const noexcept { return value_; }

  private:
    ErrorKind kind_;
    std::optional<double> tau_;
    std::optional<double> value_;
};

/// Configuration errors additionally name the offending key.
class ConfigError : public Error {
  public:
    ConfigError(std::string key, const std::string &what)
        : Error(ErrorKind::Config, "config key '" + key + "': " + what), key_(std::move(key)) {}

    const std::string &key() const noexcept { return key_; }

  private:
    std::string key_;
};

} // namespace squeezecav
