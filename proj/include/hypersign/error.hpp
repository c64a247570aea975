#pragma once

#include <stdexcept>
#include <string>

namespace hypersign {

// Domain error for everything the library can reject: malformed input,
// violated preconditions, numerical failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hypersign
