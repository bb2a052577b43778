#pragma once

#include <stdexcept>
#include <string>

namespace diffcps {

/// Invalid hyperparameter, shape or option supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An API was called out of order or with arguments outside its domain.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed dataset, checkpoint or config file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace diffcps
