#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "newsamp/errors.hpp"
#include "newsamp/numeric.hpp"

namespace newsamp {

// Index-set generators. S1 draws each iteration's set uniformly and
// independently of previous iterations (fresh stream keyed by (seed, t));
// S2 produces sequentially dependent sets whose distribution depends only on
// the seed, never on data values.
enum class SchemeKind {
  s1_with_replacement,
  s1_without_replacement,
  s2_fixed,
  s2_growing,
};

std::string scheme_name(SchemeKind kind);
SchemeKind scheme_from_name(const std::string& name);

struct SampleScheme {
  SchemeKind kind = SchemeKind::s1_with_replacement;
  // t -> |S_t|. For s2_fixed the size at t = 0 is used throughout; for
  // s2_growing the growth fields below take precedence.
  std::function<std::size_t(std::size_t)> size_schedule;
  // s2_growing: start at growth_initial, add growth_increment per iteration
  // (0 selects the default ceil(initial / 2)), capped at n. When cover_unused
  // is set, newly added indices are drawn among indices never used before;
  // since the sets grow monotonically this coincides with drawing from the
  // complement of the current set.
  std::size_t growth_initial = 0;
  std::size_t growth_increment = 0;
  bool cover_unused = true;
  std::uint64_t seed = 0;

  std::size_t size_at(std::size_t t) const;

  static SampleScheme independent(std::size_t size, std::uint64_t seed,
                                  bool with_replacement = true);
  static SampleScheme fixed_subset(std::size_t size, std::uint64_t seed);
  static SampleScheme growing(std::size_t initial, std::uint64_t seed,
                              std::size_t increment = 0);
};

// Per-run sampling state. S1 kinds and s2_fixed are stateless in t;
// s2_growing keeps the growing set and must be advanced sequentially.
class SampleStream {
 public:
  SampleStream(SampleScheme scheme, std::size_t n);

  // Sorted index multiset for iteration t.
  std::vector<std::size_t> next(std::size_t t);

 private:
  std::vector<std::size_t> draw_without_replacement(std::size_t size,
                                                    std::uint64_t counter);
  SampleScheme scheme_;
  std::size_t n_;
  std::size_t next_t_ = 0;
  std::vector<std::size_t> current_;
  std::vector<std::size_t> unused_;
};

// One-shot form: builds a stream and advances it to iteration t (O(t) for the
// growing scheme, O(1) otherwise).
std::vector<std::size_t> next_sample(const SampleScheme& scheme, std::size_t t,
                                     std::size_t n);

}  // namespace newsamp
