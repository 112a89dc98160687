#pragma once

#include <stdexcept>
#include <string>

namespace percwalk {

// Exit codes used by the CLI. Library code throws the typed errors below;
// the tool maps them at the boundary.
enum class ExitCode : int {
    ok = 0,
    validation = 2,
    resource = 3,
    margin = 4,
    io = 5,
};

// A parameter failed validation. `field` names the offending config key.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// A request exceeds the configured memory / size budget.
class ResourceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A query's geometry comes too close to the simulation-box boundary, where
// the finite-box proxy for the infinite cluster is unreliable.
class MarginError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The walk cannot start: the source vertex has no open incident edge.
class DisconnectedSourceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace percwalk
