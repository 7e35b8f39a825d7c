#pragma once

#include <stdexcept>
#include <string>

namespace finrel {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (structure files, chain files, class specs).
class parse_error : public error {
public:
    explicit parse_error(const std::string& msg) : error(msg) {}
};

// An operation was called with arguments violating its contract
// (signature mismatch, partial map where a total one is required, ...).
class precondition_error : public error {
public:
    explicit precondition_error(const std::string& msg) : error(msg) {}
};

// A configured budget (carrier size, search nodes, enumeration size) was hit.
// Searches fail loudly instead of hanging.
class resource_error : public error {
public:
    explicit resource_error(const std::string& msg) : error(msg) {}
};

// An internal consistency check failed; indicates a bug, not bad input.
class invariant_error : public error {
public:
    explicit invariant_error(const std::string& msg) : error(msg) {}
};

// A limit construction hit a step it could not discharge; the run is aborted.
class construction_error : public error {
public:
    explicit construction_error(const std::string& msg) : error(msg) {}
};

} // namespace finrel
