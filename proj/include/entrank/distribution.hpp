#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "entrank/entropy.hpp"
#include "entrank/partition.hpp"
#include "entrank/seqcore.hpp"

namespace entrank {

// 128-bit mantissa; used only to order keys, never to test equality.
using HighFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

/// Exact identifier of a (mean) block entropy.
///
/// For a block with tuple counts p_i summing to c,
///   S = log2 c - (1/c) * sum_q e_q log2 q,   e_q = sum_i p_i * v_q(p_i),
/// where v_q is the exponent of prime q. Logs of distinct primes are
/// linearly independent over the rationals, so at fixed c two blocks have
/// equal entropy iff their exponent vectors are equal. The mean of N block
/// entropies is the same expression with the exponent vectors summed and
/// 1/c replaced by 1/(cN); `blocks` carries N.
struct EntropyKey {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> exponents;  // (prime, e_q), primes ascending, e_q > 0
    std::uint64_t c = 0;
    std::uint64_t blocks = 1;

    /// Sum-key of two keys at the same (c): the key of the mean over the
    /// union of their blocks.
    EntropyKey merged(const EntropyKey& other) const;

    /// `-` when no exponents, otherwise `2:5,3:2,...`.
    std::string canonical() const;
    static std::vector<std::pair<std::uint32_t, std::uint64_t>> parse_exponents(const std::string& text);

    HighFloat value() const;
    double bits() const { return value().convert_to<double>(); }

    friend bool operator==(const EntropyKey&, const EntropyKey&) = default;
    friend auto operator<=>(const EntropyKey&, const EntropyKey&) = default;
};

struct EntropyKeyHash {
    std::size_t operator()(const EntropyKey& k) const noexcept;
};

EntropyKey entropy_key(const std::vector<std::uint32_t>& parts);
EntropyKey entropy_key(const FrequencyVector& fv);

struct DistributionMeta {
    std::size_t T = 0;
    unsigned n = 1;
    std::size_t N = 1;
    BigInt lambda = 4;
    std::uint64_t c = 0;

    friend bool operator==(const DistributionMeta&, const DistributionMeta&) = default;
};

struct DistributionEntry {
    EntropyKey key;
    BigInt count;
    HighFloat value;  // mean entropy in bits
};

/// Counting distribution of mean block entropy over every possible
/// sequence of N blocks of length T: entries sorted by entropy ascending,
/// each holding the exact number of sequences attaining it.
class EntropyDistribution {
public:
    EntropyDistribution() = default;
    EntropyDistribution(DistributionMeta meta, std::vector<DistributionEntry> entries);

    const DistributionMeta& meta() const noexcept { return meta_; }
    const std::vector<DistributionEntry>& entries() const noexcept { return entries_; }
    const BigInt& total() const noexcept { return total_; }
    /// Number of distinct entropy values.
    std::size_t distinct_values() const noexcept { return entries_.size(); }
    /// Sum of counts of entries [0, i].
    const BigInt& cumulative(std::size_t i) const { return cumulative_[i]; }

    double min_entropy() const;
    double max_entropy() const;

    /// Index of the entry with exactly this key, if present.
    std::optional<std::size_t> find(const EntropyKey& key) const;

    /// Index of the last entry whose value is <= bits + tol, if any.
    std::optional<std::size_t> last_at_or_below(double bits, double tol) const;

    /// Expected total (lambda^c)^N.
    BigInt expected_total() const;

private:
    DistributionMeta meta_;
    std::vector<DistributionEntry> entries_;
    std::vector<BigInt> cumulative_;
    BigInt total_ = 0;
};

struct BuildOptions {
    std::uint64_t partition_cap = 10'000'000;
    std::uint64_t support_cap = 10'000'000;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Single-block distribution G_{T,n}: every partition of c = floor(T/n)
/// into at most lambda = 4^n parts, its word count grouped by entropy key.
/// Throws ResourceGuardError when the partition count exceeds the cap.
EntropyDistribution build_distribution(std::size_t T, unsigned n, const BuildOptions& opts = {});

/// Distribution of the mean of N i.i.d. blocks (N-fold convolution of the
/// single-block distribution, support scaled by 1/N).
EntropyDistribution convolve_mean(const EntropyDistribution& dist, std::size_t N,
                                  const BuildOptions& opts = {});

struct RankRatio {
    Rational exact;  // lowest terms
    double value = 0.0;
};

/// Fraction of the distribution's mass at entropy <= S_obs. Observed values
/// within 1e-9 of a key count as equal to it.
RankRatio rank_ratio(const EntropyValue& observed, const EntropyDistribution& dist);

/// Same, with the observed entropy given by its exact key.
RankRatio rank_ratio(const EntropyKey& observed, const EntropyDistribution& dist);

inline constexpr double kRankTolerance = 1e-9;

/// R of the first N = dist.meta().N blocks of seq. Blocks whose tuples are
/// all real letters are compared through exact keys; blocks containing
/// padding fall back to float comparison with kRankTolerance.
RankRatio calculate_ratio(const EncodedSequence& seq, const EntropyDistribution& dist);

/// Convenience: builds the (T, n, N) distribution and evaluates R.
RankRatio calculate_ratio(const EncodedSequence& seq, std::size_t T, unsigned n, std::size_t N = 1,
                          const BuildOptions& opts = {});

struct CalibrationPoint {
    double t = 0.0;
    Rational probability;  // P(R <= t) under the counting measure
    bool within_bound = true;  // probability <= t
};

std::vector<CalibrationPoint> calibration_check(const EntropyDistribution& dist,
                                                const std::vector<double>& t_grid);

}  // namespace entrank
