#pragma once

#include <stdexcept>
#include <string>

namespace kron {

/// Violated operation precondition or malformed input.
/// The CLI maps this to exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An enumeration or search refused to run (or gave up) because it would
/// exceed a configured cap. The message carries the exact count involved.
class CapExceeded : public PreconditionError {
public:
    explicit CapExceeded(const std::string& what) : PreconditionError(what) {}
};

} // namespace kron
