#pragma once

#include <stdexcept>
#include <string>

namespace madelung {

/// Failure category, used by the CLI to pick an exit code and by tests to
/// assert that the *right* guard fired.
enum class ErrorKind {
    parse,                 // malformed config / expression / CSV input
    config,                // structurally valid input that violates a documented precondition
    constraint,            // domain invariant violated (grid shape, signature, SPD stiffness, ...)
    stencil_domain,        // grid too small: no valid points remain after mask erosion
    degeneracy,            // frame/geometry degeneracy (straight wire segment, singular h)
    empty_support,         // amplitude below floor everywhere
    internal_consistency,  // two algebraic routes that must agree numerically do not
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::parse: return "parse";
        case ErrorKind::config: return "config";
        case ErrorKind::constraint: return "constraint";
        case ErrorKind::stencil_domain: return "stencil-domain";
        case ErrorKind::degeneracy: return "degeneracy";
        case ErrorKind::empty_support: return "empty-support";
        case ErrorKind::internal_consistency: return "internal-consistency";
    }
    return "unknown";
}

}  // namespace madelung
