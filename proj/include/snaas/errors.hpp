#pragma once

#include <stdexcept>
#include <string>

namespace snaas {

// Domain errors. Each corresponds to a precondition breach a caller can
// meaningfully react to; anything else surfaces as std::invalid_argument.
struct InsufficientCapacityError : std::runtime_error {
    explicit InsufficientCapacityError(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownDroneError : std::runtime_error {
    explicit UnknownDroneError(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewDronesError : std::runtime_error {
    explicit TooFewDronesError(const std::string& what) : std::runtime_error(what) {}
};

struct NoSplitPossibleError : std::runtime_error {
    explicit NoSplitPossibleError(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroDemandError : std::runtime_error {
    explicit ZeroDemandError(const std::string& what) : std::runtime_error(what) {}
};

struct UnstablePathError : std::runtime_error {
    explicit UnstablePathError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace snaas
