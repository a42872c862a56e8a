#pragma once

#include <stdexcept>
#include <string>

namespace greenwalk {

// Thrown when a computation would exceed an explicit resource cap; the
// message names the cap and the offending size.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace greenwalk
