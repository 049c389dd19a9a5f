#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace entrank {

using Token = std::uint8_t;

inline constexpr Token kPadToken = 4;
inline constexpr unsigned kAlphabetSize = 4;

// Tuple identity: big-endian base-4 value of the tuple's tokens. Wide enough
// for tuples of up to 63 letters.
using TupleId = unsigned __int128;
inline constexpr unsigned kMaxTupleSize = 63;

/// Integer-token nucleotide sequence: 0=A, 1=C, 2=G, 3=T, 4=padding.
class EncodedSequence {
public:
    EncodedSequence() = default;
    explicit EncodedSequence(std::vector<Token> tokens);

    std::size_t length() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }
    std::span<const Token> tokens() const noexcept { return tokens_; }
    Token operator[](std::size_t i) const noexcept { return tokens_[i]; }

    /// Contiguous copy of [start, start + len).
    EncodedSequence slice(std::size_t start, std::size_t len) const;

    friend bool operator==(const EncodedSequence&, const EncodedSequence&) = default;

private:
    std::vector<Token> tokens_;
};

/// Block length T, tuple size n and block count N, with the derived
/// tuples-per-block M = floor(T/n) and alphabet size lambda = 4^n.
struct BlockSpec {
    std::size_t T = 1;
    unsigned n = 1;
    std::size_t N = 1;

    BlockSpec() = default;
    BlockSpec(std::size_t T, unsigned n, std::size_t N = 1);

    std::size_t tuples_per_block() const noexcept { return T / n; }
    std::size_t remainder() const noexcept { return T % n; }
};

/// Occurrence counts of the n-tuples seen in a sequence. Only non-zero
/// counts are stored (sorted by tuple id); every other tuple of the
/// 4^n alphabet has count zero.
class FrequencyVector {
public:
    FrequencyVector() = default;
    FrequencyVector(unsigned n, std::vector<std::pair<TupleId, std::uint64_t>> nonzero);

    unsigned tuple_size() const noexcept { return n_; }
    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t count(TupleId id) const;
    std::span<const std::pair<TupleId, std::uint64_t>> nonzero() const noexcept { return nonzero_; }

    /// Non-zero counts sorted non-increasingly (the partition shape).
    std::vector<std::uint64_t> sorted_counts() const;

private:
    unsigned n_ = 1;
    std::uint64_t total_ = 0;
    std::vector<std::pair<TupleId, std::uint64_t>> nonzero_;
};

/// Case-insensitive ACGT parse. Throws ValidationError naming the first
/// offending position. With allow_padding, '.' maps to the padding token.
EncodedSequence encode(std::string_view text, bool allow_padding = false);

/// Inverse of encode; padding renders as '.'.
std::string decode(const EncodedSequence& seq);

/// Counts over non-overlapping tuples at offsets 0, n, 2n, ...; the trailing
/// L mod n tokens are ignored and any tuple containing padding is skipped.
FrequencyVector tuple_counts(std::span<const Token> tokens, unsigned n);
inline FrequencyVector tuple_counts(const EncodedSequence& seq, unsigned n) {
    return tuple_counts(seq.tokens(), n);
}

/// floor(L/T) consecutive blocks of exactly T tokens; the tail is dropped.
std::vector<EncodedSequence> split_blocks(const EncodedSequence& seq, std::size_t T);

/// Fraction of C and G among the non-padding tokens.
double gc_content(const EncodedSequence& seq);

}  // namespace entrank
