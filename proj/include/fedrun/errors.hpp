#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fedrun {

// Bad user-supplied configuration (dims, rates, config files).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor/vector dimension or layout mismatch.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite gradients, impossible training state.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed wire bytes. Carries the byte offset where decoding failed.
struct ProtocolError : std::runtime_error {
    size_t offset;
    ProtocolError(const std::string& what, size_t off)
        : std::runtime_error(what + " (offset " + std::to_string(off) + ")"), offset(off) {}
};

// Malformed input files (CSV, policy, audit). Carries a 1-based line number.
struct ParseError : std::runtime_error {
    size_t line;
    ParseError(const std::string& what, size_t line_no)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

}  // namespace fedrun
