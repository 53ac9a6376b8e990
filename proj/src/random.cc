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

#include "gradplay/random.h"

#include <cmath>

namespace gradplay {

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t a,
                         std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = MixSeed(master);
  h = MixSeed(h ^ a);
  h = MixSeed(h ^ b);
  return MixSeed(h ^ c);
}

double Uniform01(Rng& rng) {
  // 53 random mantissa bits; avoids std::uniform_real_distribution so streams
  // are identical across standard library implementations.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Eigen::VectorXd SampleSimplex(Rng& rng, int m) {
  Eigen::VectorXd x(m);
  for (int k = 0; k < m; ++k) {
    x[k] = -std::log1p(-Uniform01(rng));
  }
  const double total = x.sum();
  if (total <= 0.0) return Eigen::VectorXd::Constant(m, 1.0 / m);
  return x / total;
}

Eigen::VectorXd SampleVertex(Rng& rng, int m) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  x[static_cast<int>(rng() % static_cast<std::uint64_t>(m))] = 1.0;
  return x;
}

}  // namespace gradplay
