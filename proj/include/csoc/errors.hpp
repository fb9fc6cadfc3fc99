#pragma once

#include <stdexcept>
#include <string>

namespace csoc {

/// Invalid argument outside an operation's domain (sizes, steps, stencils leaving a box).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation at a branch point or other singular configuration.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold at the given input.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Principal-branch logarithm is ambiguous across a stencil (argument crosses the cut or nears zero).
class BranchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csoc
