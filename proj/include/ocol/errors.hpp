#pragma once

#include <stdexcept>
#include <string>

namespace ocol {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct HorizonExceeded : std::runtime_error {
    explicit HorizonExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

struct UnboundedDomain : std::runtime_error {
    explicit UnboundedDomain(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParamError : std::runtime_error {
    explicit ParamError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ocol
