#pragma once

#include <stdexcept>
#include <string>

namespace photocount {

/// Raised when the adaptive truncation of a photon distribution would exceed
/// its configured photon-number cap.
class TruncationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an intermediate quantity is non-finite or a numerical
/// procedure (inversion, differentiation) cannot meet its tolerance.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message)
{
  if (!condition) {
    throw std::invalid_argument(message);
  }
}

} // namespace detail
} // namespace photocount
