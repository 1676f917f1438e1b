#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace marketnet {

// FNV-1a 64-bit, used for artifact checksums in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// %.17g round-trips doubles through text; fixed-decimal for human tables.
std::string fmt_g17(double v);
std::string fmt_fixed(double v, int decimals);

// requested <= 0 means "use hardware concurrency".
int effective_threads(int requested);

// Chunked parallel map over [0, n). fn(i) must write only to slot i's data.
// The result is independent of the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Fisher-Yates with an explicitly seeded mt19937_64; the permutation depends
// only on (idx.size(), seed).
void shuffle_indices(std::vector<std::size_t>& idx, std::uint64_t seed);

}  // namespace marketnet
