// Copyright 2026 The predrepo Authors.
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

// Portable counter-based pseudo-random source.
//
// A stream is identified by a 64-bit key; draw n (0-based) of the stream is
// SplitMix64Finalize(key + (n + 1) * 0x9E3779B97F4A7C15). Keys are derived
// from a seed and integer coordinates by folding each coordinate through the
// same finalizer, so any coordinate tuple addresses an independent stream and
// the output never depends on the order in which streams are consumed.
//
// Uniform doubles take the top 53 bits. Normals use the Box-Muller cosine
// branch and consume exactly two draws each.

#ifndef PREDREPO_RNG_HPP_
#define PREDREPO_RNG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

namespace predrepo {

class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t Finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t Key(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) {
    std::uint64_t key = Finalize(seed + kGamma);
    for (std::uint64_t c : coords) key = Finalize(key ^ Finalize(c + kGamma));
    return key;
  }

  std::uint64_t NextU64() { return Finalize(key_ + (++counter_) * kGamma); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  double Normal() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t Below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(NextU64()) * n) >> 64);
  }

  // Sorted sample of k distinct values from [0, n) (partial Fisher-Yates).
  std::vector<std::size_t> SampleSorted(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k && i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(Below(n - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k < n ? k : n);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace predrepo

#endif  // PREDREPO_RNG_HPP_
