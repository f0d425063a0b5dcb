/*
 * Copyright 2026 The HAL Simulator Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef HAL_RNG_H_
#define HAL_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace hal {

// Named purposes a root seed fans out to. Each component draws from its own
// stream so changing one component's consumption never shifts another's.
enum class StreamPurpose : std::uint64_t {
  kDataGen = 1,
  kSplit = 2,
  kSampler = 3,
  kClassifierInit = 4,
  kShuffle = 5,
  kClassifier = 6,
};

// Deterministic random stream keyed by (seed, stream id).
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are implementation-defined, so all
// derived draws (uniform reals, normals, bounded integers) are computed here
// from raw engine output; equal (seed, stream) pairs therefore replay
// bit-identically on every conforming platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child stream keyed by `key`; independent of how much of this stream has
  // been consumed.
  RngStream Derive(std::uint64_t key) const;
  RngStream Derive(StreamPurpose purpose) const {
    return Derive(static_cast<std::uint64_t>(purpose));
  }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  // Standard normal via the Marsaglia polar method.
  double Normal();
  bool Bernoulli(double p) { return Uniform01() < p; }
  // Uniform on [0, bound). `bound` must be positive.
  std::uint64_t UniformInt(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

// SplitMix64 finalizer; used to mix seeds and keys.
std::uint64_t MixBits(std::uint64_t x);

// FNV-1a over the bytes of `name`. Stable key for string-named streams.
std::uint64_t HashName(std::string_view name);

// Fisher-Yates shuffle driven by `rng`.
template <typename T>
void Shuffle(std::span<T> values, RngStream& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.UniformInt(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace hal

#endif  // HAL_RNG_H_
