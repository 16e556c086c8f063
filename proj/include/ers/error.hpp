#pragma once

#include <stdexcept>
#include <string>

namespace ers {

// Caller handed us an argument that violates a documented precondition.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A dense oracle was asked to materialize more than its configured cap.
class oracle_cap_error : public std::length_error {
public:
    using std::length_error::length_error;
};

// An internal invariant failed (inconsistent memo, impossible conditional,
// sampler that did not converge). Indicates a bug or corrupted state.
class invalid_state_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Persistence / stream-format problems: truncation, bad magic, version skew.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ers
