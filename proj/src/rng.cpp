#include "vflsim/rng.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace vflsim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

RngStream RngStream::split(std::string_view label) const {
  return RngStream(mix64(seed_ ^ hash_label(label)));
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix64(seed_ + 0x632be59bd9b4e019ULL * (index + 1)));
}

std::string RngStream::serialize() const {
  std::uint64_t spare_bits = 0;
  std::memcpy(&spare_bits, &spare_, sizeof spare_bits);
  std::ostringstream out;
  out << seed_ << ' ' << (have_spare_ ? 1 : 0) << ' ' << spare_bits << ' ' << engine_;
  return out.str();
}

RngStream RngStream::deserialize(const std::string& state) {
  std::istringstream in(state);
  std::uint64_t seed = 0, spare_bits = 0;
  int have_spare = 0;
  in >> seed >> have_spare >> spare_bits;
  RngStream rng(seed);
  in >> rng.engine_;
  if (!in) throw std::invalid_argument("RngStream::deserialize: malformed state text");
  rng.have_spare_ = have_spare != 0;
  std::memcpy(&rng.spare_, &spare_bits, sizeof rng.spare_);
  return rng;
}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double k = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * k;
  have_spare_ = true;
  return u * k;
}

double RngStream::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

std::uint64_t RngStream::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
  // Rejection sampling to avoid modulo bias.
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

std::vector<Index> RngStream::sample_without_replacement(Index pool, Index n) {
  if (n < 0 || n > pool)
    throw std::invalid_argument("sample_without_replacement: n out of range");
  std::vector<Index> ids(static_cast<std::size_t>(pool));
  for (Index i = 0; i < pool; ++i) ids[static_cast<std::size_t>(i)] = i;
  shuffle(ids);
  ids.resize(static_cast<std::size_t>(n));
  return ids;
}

std::size_t RngStream::weighted(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("weighted: negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("weighted: weights sum to zero");
  double r = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return i;
  }
  return weights.size() - 1;
}

Matrix random_uniform(RngStream& rng, Index rows, Index cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

Matrix random_normal(RngStream& rng, Index rows, Index cols, double mean, double stddev) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal(mean, stddev);
  return m;
}

}  // namespace vflsim
