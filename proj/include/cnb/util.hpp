#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace cnb {

/// n evenly spaced values from lo to hi inclusive (n >= 1).
std::vector<double> linspace(double lo, double hi, int n);

/// Shortest-precision round-trip formatting ("%.17g"), used for all CSV/JSON
/// numeric output so that identical inputs give byte-identical files.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

/// Number of worker threads for grid evaluation: hardware concurrency capped
/// by the NBODY_THREADS environment variable (>= 1).
int thread_budget();

/// Runs fn(i) for i in [0, n). Iterations must be independent; results keyed
/// by index stay deterministic regardless of the thread budget.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cnb
