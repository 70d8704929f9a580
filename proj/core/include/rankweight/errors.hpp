#ifndef RANKWEIGHT_ERRORS_HPP
#define RANKWEIGHT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rankweight {

// Input outside an operation's mathematical domain (rank out of range,
// zero counts, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad tuning parameter (bucket count, simulation settings, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Structurally unusable input file, e.g. a CSV without the expected header.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A ranking provider could not serve a lookup.
class ProviderError : public std::runtime_error {
 public:
  ProviderError(std::string provider, const std::string& what)
      : std::runtime_error(provider + ": " + what), provider_(std::move(provider)) {}

  const std::string& provider() const noexcept { return provider_; }

 private:
  std::string provider_;
};

class StorageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public StorageError {
 public:
  using StorageError::StorageError;
};

class IntegrityError : public StorageError {
 public:
  using StorageError::StorageError;
};

// Two snapshots cannot be diffed (different universe size or scheme).
class ComparabilityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A bundled resource (map geometry) is missing or unreadable.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rankweight

#endif  // RANKWEIGHT_ERRORS_HPP
