#pragma once

#include <stdexcept>
#include <string>

namespace sentra {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct StorageError : std::runtime_error {
    explicit StorageError(const std::string& what) : std::runtime_error(what) {}
};

struct TransportError : std::runtime_error {
    explicit TransportError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by a replay feed when the file is fully consumed; signals a clean
// session end, not a failure.
struct ReplayExhausted : std::runtime_error {
    ReplayExhausted() : std::runtime_error("replay exhausted") {}
};

struct NonMonotoneTimestamp : std::runtime_error {
    explicit NonMonotoneTimestamp(const std::string& what) : std::runtime_error(what) {}
};

struct SchemaViolation : std::runtime_error {
    explicit SchemaViolation(const std::string& what) : std::runtime_error(what) {}
};

struct BackendTimeout : std::runtime_error {
    explicit BackendTimeout(const std::string& what) : std::runtime_error(what) {}
};

struct SafetyGateClosed : std::runtime_error {
    explicit SafetyGateClosed(const std::string& what) : std::runtime_error(what) {}
};

struct RouterError : std::runtime_error {
    explicit RouterError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sentra
