// Copyright 2026 The HPQS Authors.
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

#include "hpqs/rng.hpp"

namespace hpqs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::derive(std::uint64_t seed, std::string_view purpose,
                std::initializer_list<std::uint64_t> indices) {
  // FNV-1a over the label, then a splitmix chain over every key component.
  std::uint64_t label = 0xcbf29ce484222325ULL;
  for (unsigned char c : purpose) {
    label ^= c;
    label *= 0x100000001b3ULL;
  }
  std::uint64_t key = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
  key = splitmix64(key ^ label);
  std::uint64_t position = 1;
  for (std::uint64_t index : indices) {
    key = splitmix64(key ^ splitmix64(index + (position++ << 56)));
  }
  key = splitmix64(key ^ position);
  return Rng(key);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = max() - max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

}  // namespace hpqs
