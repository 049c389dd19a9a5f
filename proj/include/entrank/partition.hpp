#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace entrank {

using BigInt = boost::multiprecision::cpp_int;

/// Partition of `total` into non-increasing positive parts. Zero parts of
/// the full lambda-length vector are implicit.
struct OrderedPartition {
    std::vector<std::uint32_t> parts;
    std::uint32_t total = 0;

    std::size_t num_parts() const noexcept { return parts.size(); }
    friend bool operator==(const OrderedPartition&, const OrderedPartition&) = default;
};

/// Streams every partition of c into at most max_parts parts, each part at
/// most max_part, in lexicographically decreasing order. c = 0 yields the
/// single empty partition.
class PartitionGenerator {
public:
    static constexpr std::uint32_t kUnbounded = std::numeric_limits<std::uint32_t>::max();

    PartitionGenerator(std::uint32_t c, std::uint64_t max_parts, std::uint32_t max_part = kUnbounded);

    /// Advances to the next partition; false once exhausted. The first call
    /// positions on the first partition.
    bool next();
    const std::vector<std::uint32_t>& parts() const noexcept { return parts_; }

private:
    bool fill(std::size_t from, std::uint32_t remaining, std::uint32_t cap);

    std::uint32_t c_;
    std::uint64_t max_parts_;
    std::uint32_t max_part_;
    std::vector<std::uint32_t> parts_;
    bool started_ = false;
    bool done_ = false;
};

std::vector<OrderedPartition> enumerate_partitions(std::uint32_t c, std::uint64_t max_parts);

/// Number of partitions of c into at most max_parts parts, saturating at
/// UINT64_MAX.
std::uint64_t count_partitions(std::uint32_t c, std::uint64_t max_parts);

/// Number of length-c words over a lambda-letter alphabet whose sorted
/// frequency vector equals `parts`:
///   lambda! / ((lambda - k)! * gamma) * c! / prod(p_i!)
/// where gamma is the product of factorials of the multiplicities of the
/// distinct part values.
BigInt count_words(const std::vector<std::uint32_t>& parts, const BigInt& lambda);

/// Precomputed factorials and falling factorials for repeated count_words
/// calls at fixed (c, lambda).
class WordCounter {
public:
    WordCounter(std::uint32_t c, const BigInt& lambda);
    BigInt operator()(const std::vector<std::uint32_t>& parts) const;

private:
    std::uint32_t c_;
    std::vector<BigInt> factorial_;          // 0! .. c!
    std::vector<BigInt> falling_;            // lambda^(k falling), k = 0..min(c, lambda)
};

}  // namespace entrank
