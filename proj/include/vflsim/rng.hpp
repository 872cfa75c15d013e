#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "vflsim/types.hpp"

namespace vflsim {

// Deterministic, portable random stream.
//
// mt19937_64 gives a standard-specified bit sequence; the value transforms
// below (uniform, normal, shuffle, ...) are hand-rolled because the std
// distribution objects are implementation-defined and would break
// reproducibility across standard libraries.
//
// Streams form a tree: split("name") derives an independent child whose seed
// depends only on the parent's construction seed and the label, never on how
// much the parent has been consumed.  That keeps draw order stable when code
// between two split() calls changes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream split(std::string_view label) const;
  RngStream split(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  // Full stream state as text (engine state, spare-normal cache, seed), and
  // its exact inverse.  Round-tripping resumes the draw sequence bitwise.
  std::string serialize() const;
  static RngStream deserialize(const std::string& state);

  std::uint64_t next_u64();
  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via the polar method (pairs cached).
  double normal();
  double normal(double mean, double stddev);
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Fisher–Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First n entries of a shuffled [0, pool) — unique, order randomized.
  std::vector<Index> sample_without_replacement(Index pool, Index n);

  // Index in [0, weights.size()) with probability proportional to weights.
  std::size_t weighted(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fills a matrix / vector with iid draws.
Matrix random_uniform(RngStream& rng, Index rows, Index cols, double lo, double hi);
Matrix random_normal(RngStream& rng, Index rows, Index cols, double mean, double stddev);

// splitmix64 finalizer — used anywhere a one-off hash of integers is needed.
std::uint64_t mix64(std::uint64_t x);
// FNV-1a over a label, for deriving child stream seeds.
std::uint64_t hash_label(std::string_view label);

}  // namespace vflsim
