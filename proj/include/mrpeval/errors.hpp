#pragma once

#include <stdexcept>
#include <string>

namespace mrpeval {

/// Input violated a documented contract (malformed matrix, bad flag, bad config).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mrpeval
