#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wlc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed container, manifest or model file. Carries the byte offset and
// the header field that failed validation.
class FormatError : public Error {
public:
    FormatError(const std::string& field, std::size_t offset, const std::string& what)
        : Error(what + " (field '" + field + "' at offset " + std::to_string(offset) + ")"),
          field_(field),
          offset_(offset) {}

    const std::string& field() const noexcept { return field_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string field_;
    std::size_t offset_;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Inputs that violate an operation's precondition (shape mismatch, empty set, ...).
class DataError : public Error {
public:
    using Error::Error;
};

// Optimisation blew up (non-finite loss and the like).
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace wlc
