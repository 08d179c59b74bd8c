// Copyright 2026 The manlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>

namespace manlab {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream.
///
/// Draw number `k` of stream `(seed, stream)` is a pure function of the triple
/// `(seed, stream, k)`, so per-sample child streams give identical results
/// whatever order or thread evaluates them. Satisfies
/// UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(derive_key(seed, stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return at(counter_++); }

  /// Draw `counter` of this stream without advancing it.
  [[nodiscard]] result_type at(std::uint64_t counter) const {
    return detail::splitmix64(key_ + counter * detail::kGolden);
  }

  /// Independent stream indexed by `index`, e.g. one per Monte-Carlo sample.
  [[nodiscard]] RngStream child(std::uint64_t index) const {
    return RngStream(seed_, detail::splitmix64(stream_ ^ detail::splitmix64(index + 0x5851f42d4c957f2dULL)));
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Pair of independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

  double normal() { return normal_pair().first; }

  /// Complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal() {
    auto [a, b] = normal_pair();
    return {a * std::numbers::sqrt2 / 2.0, b * std::numbers::sqrt2 / 2.0};
  }

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t stream() const { return stream_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(detail::splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace manlab
