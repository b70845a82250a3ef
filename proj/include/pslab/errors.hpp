#pragma once

#include <stdexcept>
#include <string>

namespace pslab {

// Maps to CLI exit code 2.
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Maps to CLI exit code 3. Thrown when the residue sieve exhausts its retry
// budget; carries the best partial assignment as a diagnostic string.
struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& what, std::string partial = {})
        : std::runtime_error(what), best_partial(std::move(partial)) {}
    std::string best_partial;
};

// Maps to CLI exit code 4 (memory budget, unwritable path, ...).
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// A verification step contradicted something the construction guarantees.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace pslab
