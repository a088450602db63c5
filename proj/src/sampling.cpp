#include "newsamp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace newsamp {

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::s1_with_replacement: return "s1";
    case SchemeKind::s1_without_replacement: return "s1-nr";
    case SchemeKind::s2_fixed: return "s2-fixed";
    case SchemeKind::s2_growing: return "s2-growing";
  }
  return "unknown";
}

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "s1") return SchemeKind::s1_with_replacement;
  if (name == "s1-nr") return SchemeKind::s1_without_replacement;
  if (name == "s2-fixed") return SchemeKind::s2_fixed;
  if (name == "s2-growing") return SchemeKind::s2_growing;
  throw InvalidInput("unknown sampling scheme '" + name + "'");
}

std::size_t SampleScheme::size_at(std::size_t t) const {
  if (kind == SchemeKind::s2_growing) {
    std::size_t inc =
        growth_increment > 0 ? growth_increment : (growth_initial + 1) / 2;
    return growth_initial + t * inc;
  }
  if (!size_schedule) throw InvalidInput("sample scheme has no size schedule");
  return size_schedule(kind == SchemeKind::s2_fixed ? 0 : t);
}

SampleScheme SampleScheme::independent(std::size_t size, std::uint64_t seed,
                                       bool with_replacement) {
  SampleScheme s;
  s.kind = with_replacement ? SchemeKind::s1_with_replacement
                            : SchemeKind::s1_without_replacement;
  s.size_schedule = [size](std::size_t) { return size; };
  s.seed = seed;
  return s;
}

SampleScheme SampleScheme::fixed_subset(std::size_t size, std::uint64_t seed) {
  SampleScheme s;
  s.kind = SchemeKind::s2_fixed;
  s.size_schedule = [size](std::size_t) { return size; };
  s.seed = seed;
  return s;
}

SampleScheme SampleScheme::growing(std::size_t initial, std::uint64_t seed,
                                   std::size_t increment) {
  SampleScheme s;
  s.kind = SchemeKind::s2_growing;
  s.growth_initial = initial;
  s.growth_increment = increment;
  s.seed = seed;
  return s;
}

SampleStream::SampleStream(SampleScheme scheme, std::size_t n)
    : scheme_(std::move(scheme)), n_(n) {
  if (n_ < 1) throw InvalidInput("dataset size must be at least 1");
  if (scheme_.kind == SchemeKind::s2_growing) {
    if (scheme_.growth_initial < 1 || scheme_.growth_initial > n_)
      throw InvalidSize("growing scheme initial size must lie in [1, n]");
    unused_.resize(n_);
    std::iota(unused_.begin(), unused_.end(), std::size_t{0});
  }
}

std::vector<std::size_t> SampleStream::draw_without_replacement(
    std::size_t size, std::uint64_t counter) {
  Rng rng = Rng::keyed(scheme_.seed, counter);
  std::vector<std::size_t> pool(n_);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t j = i + rng.below(n_ - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> SampleStream::next(std::size_t t) {
  switch (scheme_.kind) {
    case SchemeKind::s1_with_replacement: {
      std::size_t size = scheme_.size_at(t);
      if (size < 1) throw InvalidSize("sample size must be at least 1");
      Rng rng = Rng::keyed(scheme_.seed, t);
      std::vector<std::size_t> out(size);
      for (std::size_t i = 0; i < size; ++i) out[i] = rng.below(n_);
      std::sort(out.begin(), out.end());
      return out;
    }
    case SchemeKind::s1_without_replacement: {
      std::size_t size = scheme_.size_at(t);
      if (size < 1 || size > n_)
        throw InvalidSize("without-replacement sample size " +
                          std::to_string(size) + " must lie in [1, " +
                          std::to_string(n_) + "]");
      return draw_without_replacement(size, t);
    }
    case SchemeKind::s2_fixed: {
      std::size_t size = scheme_.size_at(0);
      if (size < 1 || size > n_)
        throw InvalidSize("fixed sample size must lie in [1, n]");
      return draw_without_replacement(size, 0);
    }
    case SchemeKind::s2_growing: {
      if (t != next_t_)
        throw InvalidInput("growing scheme must be advanced sequentially");
      ++next_t_;
      std::size_t target = std::min(scheme_.size_at(t), n_);
      Rng rng = Rng::keyed(scheme_.seed, t);
      while (current_.size() < target && !unused_.empty()) {
        std::size_t j = rng.below(unused_.size());
        current_.push_back(unused_[j]);
        unused_[j] = unused_.back();
        unused_.pop_back();
      }
      std::vector<std::size_t> out = current_;
      std::sort(out.begin(), out.end());
      return out;
    }
  }
  throw InvalidInput("unknown sampling scheme");
}

std::vector<std::size_t> next_sample(const SampleScheme& scheme, std::size_t t,
                                     std::size_t n) {
  SampleStream stream(scheme, n);
  if (scheme.kind == SchemeKind::s2_growing) {
    std::vector<std::size_t> out;
    for (std::size_t tau = 0; tau <= t; ++tau) out = stream.next(tau);
    return out;
  }
  return stream.next(t);
}

}  // namespace newsamp
