#include "newsamp/trace_io.hpp"

#include <fstream>
#include <ostream>

#include <json.hpp>

#include "newsamp/errors.hpp"

namespace newsamp {

using json = nlohmann::ordered_json;

std::string stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::eps_reached: return "eps-reached";
    case StopReason::max_iters: return "max-iters";
    case StopReason::error: return "error";
  }
  return "unknown";
}

std::vector<double> Trace::distances() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (r.dist) out.push_back(*r.dist);
  }
  return out;
}

namespace {

json opt_field(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::optional<double> read_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
  for (const auto& r : trace.records) {
    json line;
    line["t"] = r.t;
    line["f"] = r.objective;
    line["grad_norm"] = r.grad_norm;
    line["step"] = opt_field(r.step);
    line["lam_r1"] = opt_field(r.lambda_threshold);
    line["lam_p"] = opt_field(r.lambda_min);
    line["dist"] = opt_field(r.dist);
    line["elapsed_s"] = r.elapsed_s;
    out << line.dump() << '\n';
  }
}

void write_trace_jsonl(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trace_jsonl(trace, out);
}

Trace read_trace_jsonl(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("bad trace line: ") + e.what(), line_no);
    }
    TraceRecord rec;
    rec.t = j.at("t").get<std::size_t>();
    rec.objective = j.at("f").get<double>();
    rec.grad_norm = j.at("grad_norm").get<double>();
    rec.step = read_opt(j, "step");
    rec.lambda_threshold = read_opt(j, "lam_r1");
    rec.lambda_min = read_opt(j, "lam_p");
    rec.dist = read_opt(j, "dist");
    rec.elapsed_s = j.at("elapsed_s").get<double>();
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

Trace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_trace_jsonl(in);
}

}  // namespace newsamp
