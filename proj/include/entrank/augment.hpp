#pragma once

#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "entrank/distribution.hpp"
#include "entrank/random.hpp"
#include "entrank/seqcore.hpp"

namespace entrank {

enum class Pick { Max, Min };

struct CropConfig {
    std::size_t target_len = 22;
    std::size_t num_candidates = 1;
    double offset_ratio = 0.0;
    double alpha = 1.0;
    double beta = 0.0;
    Pick pick = Pick::Max;      // compressor crop only
    std::size_t T = 22;         // ratio scoring
    unsigned n = 1;             // ratio and entropy scoring
    std::size_t N = 1;          // ratio scoring
    std::uint64_t seed = 0;

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

/// A cropped sequence plus where it came from. `start` is empty when the
/// input was passed through or padded instead of windowed.
struct Crop {
    EncodedSequence sequence;
    std::optional<std::size_t> start;
};

/// Right-pads with the padding token up to target_len. Inputs longer than
/// target_len are rejected; crop them first.
EncodedSequence pad_or_sample(const EncodedSequence& seq, std::size_t target_len);

/// Offsets drawn i.i.d. uniform over [-max_offset, max_offset].
std::vector<std::int64_t> draw_offsets(Rng& rng, std::int64_t max_offset, std::size_t count);

/// Window geometry shared by all random crops.
struct WindowGeometry {
    std::size_t center = 0;       // floor((L - target_len) / 2)
    std::int64_t max_offset = 0;  // floor((L - target_len) * offset_ratio)
    std::size_t max_start = 0;    // L - target_len

    WindowGeometry(std::size_t L, std::size_t target_len, double offset_ratio);
    std::size_t start_for(std::int64_t offset) const;
    double offset_penalty(std::int64_t offset) const;
};

Crop basic_crop(const EncodedSequence& seq, std::size_t target_len);
Crop random_crop(const EncodedSequence& seq, const CropConfig& cfg);

/// Candidate minimising alpha*|S_window - full_entropy| + beta*|offset|/max_offset,
/// window entropy taken over the whole window (N = 1) with tuple size cfg.n.
/// Inputs no longer than target_len are returned unchanged.
Crop entropy_crop(const EncodedSequence& seq, const CropConfig& cfg, double full_entropy);

/// As entropy_crop, scoring windows by |R(window) - ratio_whole_seq| against
/// `dist`, which must be the (cfg.T, cfg.n, cfg.N) distribution. Short
/// inputs go through pad_or_sample.
Crop ratio_crop(const EncodedSequence& seq, const CropConfig& cfg, double ratio_whole_seq,
                const EntropyDistribution& dist);

/// Memo of DEFLATE output lengths keyed by the packed byte buffer.
/// Inserts beyond max_size are skipped; nothing is evicted.
class CompressorCache {
public:
    static constexpr std::size_t kDefaultMaxSize = 65'536;

    explicit CompressorCache(std::size_t max_size = kDefaultMaxSize) : max_size_(max_size) {}

    std::optional<std::size_t> lookup(const std::string& key) const;
    void insert(const std::string& key, std::size_t length);

    std::size_t size() const;
    std::size_t max_size() const noexcept { return max_size_; }
    std::size_t hits() const;
    std::size_t misses() const;

private:
    std::size_t max_size_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::size_t> entries_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

/// Length of the raw DEFLATE stream of `bytes` at the fastest level.
std::size_t deflate_length(std::span<const std::uint8_t> bytes);

/// Compressed length of the chunk packed one token per byte; 0 for an
/// empty chunk. Memoized in `cache`.
std::size_t compress_subchunk(std::span<const Token> chunk, CompressorCache& cache);

enum class ExecMode { Sequential, Parallel };

/// Candidate with the largest (Pick::Max) or smallest compressed length;
/// the lowest candidate index wins ties in both modes. Inputs no longer
/// than target_len are returned unchanged.
Crop kolmogorov_crop(const EncodedSequence& seq, const CropConfig& cfg, CompressorCache& cache,
                     ExecMode mode = ExecMode::Sequential, unsigned threads = 0);

}  // namespace entrank
