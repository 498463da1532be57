#pragma once
// JSONL trace files: one header object on the first line, one packet object
// per following line. Doubles survive a save/load round trip bit-exactly.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "curbside/types.hpp"

namespace curbside {

struct TraceFormatError : std::runtime_error {
  TraceFormatError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

// Reads a trace. An empty file yields an empty trace with a default header.
// Malformed JSON, dimension mismatches, non-finite values, or out-of-order
// timestamps raise TraceFormatError carrying the offending line number.
Trace load_trace(const std::filesystem::path& path);

void save_trace(const std::filesystem::path& path, const Trace& trace);

}  // namespace curbside
