#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fpwm {

struct Violation {
    std::string code;
    std::string message;
};

// Invalid configuration. Carries every violated constraint.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::vector<Violation> v = {})
        : std::runtime_error(what), violations(std::move(v)) {}
    std::vector<Violation> violations;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A computed quantity contradicts a structural guarantee of the model.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A design whose real-post equilibria break the threshold it was built for.
class UnsafeDesign : public InvariantViolation {
public:
    using InvariantViolation::InvariantViolation;
};

class InfeasibleDesign : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fpwm
