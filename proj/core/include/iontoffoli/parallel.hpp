// Copyright 2026 The iontoffoli Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>

namespace iontoffoli {

inline constexpr const char* kThreadsEnv = "IONTOFFOLI_THREADS";

/// Worker count: the explicit request if given, else $IONTOFFOLI_THREADS,
/// else the hardware concurrency. Always at least 1.
int resolve_threads(std::optional<int> requested = std::nullopt);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out dynamically. The first exception thrown by any body is rethrown after
/// all workers have stopped.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace iontoffoli
