// Copyright 2026 The Postprice Authors.
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

#include "postprice/random.h"

#include <cmath>
#include <cstring>

namespace postprice {

uint64_t SplitMix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> keys) {
  uint64_t state = master;
  uint64_t out = SplitMix64(state);
  for (uint64_t key : keys) {
    state ^= key + 0x632be59bd9b4e019ULL + (out << 6) + (out >> 2);
    out = SplitMix64(state);
  }
  return out;
}

uint64_t HashLabel(std::string_view label) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

uint64_t DoubleBits(double value) {
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  return bits;
}

Rng MakeStream(uint64_t master, uint64_t index) {
  return Rng(DeriveSeed(master, {index}));
}

double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double UniformOpen01(Rng& rng) {
  // Midpoint of one of 2^53 equal cells.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double Exponential(Rng& rng, double rate) {
  return -std::log(UniformOpen01(rng)) / rate;
}

}  // namespace postprice
