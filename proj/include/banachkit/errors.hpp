#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace banachkit {

// Input exceeds a hard combinatorial or materialization cap.
class SizeError : public std::runtime_error {
public:
    explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver hit its iteration cap without meeting its tolerance.
// `diagnostics` holds the solver state needed to replay the failure.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::string diagnostics)
        : std::runtime_error(what), diagnostics(std::move(diagnostics)) {}
    std::string diagnostics;
};

// Syntax or semantic error in a space expression, with source position.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position, std::string expected = {})
        : std::runtime_error(what + " at position " + std::to_string(position)),
          position(position),
          expected(std::move(expected)) {}
    std::size_t position;
    std::string expected;
};

}  // namespace banachkit
