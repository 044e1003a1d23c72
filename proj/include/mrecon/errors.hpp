#pragma once

#include <stdexcept>
#include <string>

namespace mrecon {

// Domain failures carry a short machine-readable kind next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error("invalid-argument", what) {}
};

class GraphDisconnected : public Error {
public:
    GraphDisconnected(int i, int j)
        : Error("graph-disconnected",
                "points " + std::to_string(i) + " and " + std::to_string(j) +
                    " lie in different components"),
          first(i), second(j) {}
    int first;
    int second;
};

class DegenerateSpectrum : public Error {
public:
    explicit DegenerateSpectrum(const std::string& what) : Error("degenerate-spectrum", what) {}
};

class EmptyObjective : public Error {
public:
    explicit EmptyObjective(const std::string& what) : Error("empty-objective", what) {}
};

class NoConstraints : public Error {
public:
    explicit NoConstraints(const std::string& what) : Error("no-constraints", what) {}
};

class NetTooCoarse : public Error {
public:
    NetTooCoarse(double delta, double required)
        : Error("net-too-coarse", "landmark net radius " + std::to_string(delta) +
                                      " exceeds required " + std::to_string(required)),
          delta(delta), required(required) {}
    double delta;
    double required;
};

// Wraps a failure with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage-failure", stage + ": " + what), stage(std::move(stage)) {}
    std::string stage;
};

} // namespace mrecon
