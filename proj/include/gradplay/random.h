// Copyright 2026 The gradplay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRADPLAY_RANDOM_H_
#define GRADPLAY_RANDOM_H_

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gradplay {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t MixSeed(std::uint64_t x);
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t a,
                         std::uint64_t b = 0, std::uint64_t c = 0);

double Uniform01(Rng& rng);

// Uniform sample from the probability simplex of dimension m
// (normalized exponentials).
Eigen::VectorXd SampleSimplex(Rng& rng, int m);

// A vertex e_k with k uniform in [0, m).
Eigen::VectorXd SampleVertex(Rng& rng, int m);

}  // namespace gradplay

#endif  // GRADPLAY_RANDOM_H_
