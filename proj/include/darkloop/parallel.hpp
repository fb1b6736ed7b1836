// Copyright 2026 The darkloop Authors
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

#ifndef DARKLOOP_PARALLEL_HPP_
#define DARKLOOP_PARALLEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>

namespace darkloop {

/// Seed of work unit `counter` under `master`: splitmix64(master + (counter+1)·φ64).
/// Units seeded this way give the same results in any execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any unit is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace darkloop

#endif  // DARKLOOP_PARALLEL_HPP_
