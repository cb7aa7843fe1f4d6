#pragma once

#include <stdexcept>
#include <string>

namespace effbudget {

enum class ErrorKind {
    model,
    solver_stalled,
    instance,
    budget,
    classification,
    state,
    parse,
    validation,
    sampling,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Errors the CLI reports as solver failures (exit 2); everything else is a
// validation failure (exit 1).
bool is_solver_error(ErrorKind k);

}  // namespace effbudget
