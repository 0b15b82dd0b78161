#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "panelrom/types.hpp"

namespace panelrom {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
// written to preallocated slots so the outcome is independent of scheduling.
void parallel_for(Index n, int workers, const std::function<void(Index)>& fn);

inline int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// FNV-1a, used for artifact staleness tracking.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t hash_file(const std::string& path);

std::string to_hex(std::uint64_t v);

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

// Formats a double so that reading it back reproduces the value bit-exactly.
std::string format_full(double v);

} // namespace panelrom
