#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robreg {

// Violated precondition (bad dimension, non-positive radius, T too small...).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite or out-of-domain numeric input.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A sample source ran dry before an optimizer consumed what it needed.
class StreamExhausted : public std::runtime_error {
public:
    StreamExhausted(std::size_t consumed, std::size_t required)
        : std::runtime_error("sample stream exhausted after " + std::to_string(consumed) +
                             " samples (" + std::to_string(required) + " required)"),
          consumed_(consumed),
          required_(required) {}

    std::size_t consumed() const noexcept { return consumed_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t consumed_;
    std::size_t required_;
};

} // namespace robreg
