#ifndef SILTOK_ERROR_HPP
#define SILTOK_ERROR_HPP

#include <stdexcept>
#include <string>

namespace siltok {

// Bad inputs: out-of-range indices, dimension mismatches, malformed files.
// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem or stream failures. Maps to CLI exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace siltok

#endif // SILTOK_ERROR_HPP
