#pragma once

#include <stdexcept>
#include <string>

namespace topomap {

/// Raised when caller-supplied values violate an operation's preconditions.
class InputError : public std::invalid_argument {
public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised by the file loaders; the message names the offending record.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

} // namespace detail
} // namespace topomap
