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

// Seed derivation and portable variate transforms. Every Monte Carlo run owns
// an engine seeded from (master seed, run index), so results do not depend
// on scheduling.

#ifndef POSTPRICE_RANDOM_H_
#define POSTPRICE_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace postprice {

using Rng = std::mt19937_64;

uint64_t SplitMix64(uint64_t& state);

// Folds keys into the master seed with SplitMix64 finalization.
uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> keys);

// Stable 64-bit FNV-1a hash for labels that enter seed derivation.
uint64_t HashLabel(std::string_view label);

// Bit pattern of a double, for seeding on real-valued grid coordinates.
uint64_t DoubleBits(double value);

Rng MakeStream(uint64_t master, uint64_t index);

// Uniform on [0, 1) with 53 random bits.
double Uniform01(Rng& rng);
// Uniform on (0, 1).
double UniformOpen01(Rng& rng);
// Exponential with the given rate, via inversion.
double Exponential(Rng& rng, double rate);

}  // namespace postprice

#endif  // POSTPRICE_RANDOM_H_
