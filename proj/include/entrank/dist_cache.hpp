#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "entrank/distribution.hpp"

namespace entrank {

// Text serialization, version 1:
//
//   entrank-dist v1
//   T=<int> n=<int> N=<int> lambda=<int> c=<int>
//   <entropy, 17 significant digits> <exponent vector> <count>   (one per key, entropy ascending)
//   total <decimal>
//
// All integers are decimal. The entropy column is informational; on read
// the value is recomputed from the exponent vector and checked against it.
void write_distribution(std::ostream& out, const EntropyDistribution& dist);
EntropyDistribution read_distribution(std::istream& in);

/// Directory of serialized distributions keyed by (T, n, N).
class DistributionCache {
public:
    explicit DistributionCache(std::filesystem::path dir);

    std::filesystem::path path_for(std::size_t T, unsigned n, std::size_t N) const;
    std::optional<EntropyDistribution> load(std::size_t T, unsigned n, std::size_t N) const;

    /// Writes to a temporary file in the cache directory, then renames it
    /// into place.
    std::filesystem::path store(const EntropyDistribution& dist) const;

    /// Cached distribution if present, otherwise build (and convolve when
    /// N > 1) and store it. `hit` reports which path was taken.
    EntropyDistribution get_or_build(std::size_t T, unsigned n, std::size_t N, const BuildOptions& opts,
                                     bool* hit = nullptr) const;

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
};

}  // namespace entrank
