#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include <json.hpp>

#include "newsamp/trace_io.hpp"

using namespace newsamp;

namespace {

Trace sample_trace() {
  Trace tr;
  for (std::size_t t = 0; t < 3; ++t) {
    TraceRecord rec;
    rec.t = t;
    rec.objective = 1.0 / (t + 1.0);
    rec.grad_norm = 0.5 / (t + 1.0);
    if (t < 2) {
      rec.step = 1.25;
      rec.lambda_threshold = 0.5;
      rec.lambda_min = 0.1;
    }
    rec.dist = 0.25 / (t + 1.0);
    rec.elapsed_s = 0.001 * static_cast<double>(t);
    tr.records.push_back(rec);
  }
  tr.reason = StopReason::eps_reached;
  tr.iterations = 1;
  return tr;
}

}  // namespace

TEST_CASE("jsonl schema is exactly the documented key set, in order") {
  std::ostringstream out;
  write_trace_jsonl(sample_trace(), out);
  std::istringstream in(out.str());
  std::string line;
  const std::vector<std::string> expected{
      "t", "f", "grad_norm", "step", "lam_r1", "lam_p", "dist", "elapsed_s"};
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    auto j = nlohmann::ordered_json::parse(line);
    REQUIRE(j.size() == expected.size());
    std::size_t k = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++k)
      CHECK(it.key() == expected[k]);
  }
  CHECK(lines == 3);
}

TEST_CASE("null encodes inapplicable fields") {
  std::ostringstream out;
  write_trace_jsonl(sample_trace(), out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);  // final record has no step information
  auto j = nlohmann::ordered_json::parse(line);
  CHECK(j["step"].is_null());
  CHECK(j["lam_r1"].is_null());
  CHECK(j["dist"].is_number());
}

TEST_CASE("round trip preserves records") {
  Trace tr = sample_trace();
  std::ostringstream out;
  write_trace_jsonl(tr, out);
  std::istringstream in(out.str());
  Trace back = read_trace_jsonl(in);
  REQUIRE(back.records.size() == tr.records.size());
  for (std::size_t i = 0; i < tr.records.size(); ++i) {
    CHECK(back.records[i].t == tr.records[i].t);
    CHECK(back.records[i].objective == tr.records[i].objective);
    CHECK(back.records[i].dist == tr.records[i].dist);
    CHECK(back.records[i].step == tr.records[i].step);
  }
  CHECK(back.distances().size() == 3);
}
