#pragma once

#include <stdexcept>
#include <string>

namespace pmqkd {

// Argument outside its mathematical domain (entropy at x<0, PLOB at eta>=1, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Phase difference not within tolerance of any lattice point 2*pi*k/n.
struct NotOnLattice : DomainError {
    using DomainError::DomainError;
};

// Parameter violates a declared invariant; message names the field.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Config text rejected; carries the 1-based offending line.
struct ParseError : std::runtime_error {
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
    int line;
};

// Unknown model selector passed to an estimator.
struct ModelUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pmqkd
