#pragma once

#include <stdexcept>
#include <string>

namespace entsim {

// Thrown when a caller breaks a documented precondition or a value fails
// its construction invariant (non-unit vector, non-unitary matrix, ...).
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractViolation(message);
}

}  // namespace entsim
