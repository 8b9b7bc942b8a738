#pragma once

#include <string>

#include "pmqkd/errors.hpp"
#include "pmqkd/params.hpp"

namespace pmqkd {

// Parse "key = value" text into ProtocolParams. Blank lines and '#' comments
// are skipped; later duplicates win; keys are the ProtocolParams fields plus
// "mu" (sets both mu_a and mu_b). Unknown keys or malformed values raise
// ParseError with the 1-based line number; the parsed result is validated,
// so invariant violations raise RangeError naming the field.
ProtocolParams parse_config(const std::string& text);

}  // namespace pmqkd
