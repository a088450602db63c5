#pragma once

#include <iosfwd>
#include <string>

#include "newsamp/trace.hpp"

namespace newsamp {

// JSON-lines trace serialization. One object per record with exactly the keys
//   t, f, grad_norm, step, lam_r1, lam_p, dist, elapsed_s
// in that order; inapplicable fields are null. Consumers treat this layout as
// a stable schema.
void write_trace_jsonl(const Trace& trace, std::ostream& out);
void write_trace_jsonl(const Trace& trace, const std::string& path);

Trace read_trace_jsonl(std::istream& in);
Trace read_trace_jsonl(const std::string& path);

}  // namespace newsamp
