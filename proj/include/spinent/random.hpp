// Copyright 2026 The spinent Authors
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

// random.hpp: counter-based random streams keyed by (seed, label, index).
//
// Every draw is a pure function of the key and the draw counter, so a
// realization can be regenerated in isolation and parallel scheduling never
// changes results. Sub-streams are derived by hashing a text label into the
// key; the labels used by the library are listed next to their call sites
// ("disorder/<kind>" for ensembles).

#pragma once

#include <cstdint>
#include <string_view>

namespace spinent {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// FNV-1a, 64 bit.
inline constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                           std::uint64_t index = 0) {
    return splitmix64(splitmix64(seed ^ hash_label(label)) + index);
}

class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t next_u64() {
        return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * (++counter_));
    }

    // Uniform on [0, 1) with 53 random bits.
    constexpr double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    constexpr std::uint64_t key() const { return key_; }
    constexpr std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace spinent
