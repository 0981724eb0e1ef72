// Error types shared across modules.

#ifndef SYNLIN_ERRORS_H_
#define SYNLIN_ERRORS_H_

#include <stdexcept>

namespace synlin {

// Inconsistent dimensions, modes or model combinations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training data that violates a precondition (e.g. gold action infeasible).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimization diverged.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing required arguments or contradictory flags.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synlin

#endif  // SYNLIN_ERRORS_H_
