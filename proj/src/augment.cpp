#include "entrank/augment.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <zlib.h>

#include "entrank/errors.hpp"
#include "entrank/parallel.hpp"

namespace entrank {

void CropConfig::validate() const {
    if (target_len == 0) throw ValidationError("target_len must be >= 1");
    if (num_candidates == 0) throw ValidationError("num_candidates must be >= 1");
    if (!(offset_ratio >= 0.0 && offset_ratio <= 1.0)) throw ValidationError("offset_ratio must lie in [0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be a non-negative number");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be a non-negative number");
    BlockSpec(T, n, N);
}

EncodedSequence pad_or_sample(const EncodedSequence& seq, std::size_t target_len) {
    if (seq.length() > target_len) {
        throw ValidationError("sequence of length " + std::to_string(seq.length()) + " is longer than target " +
                              std::to_string(target_len) + "; crop it first");
    }
    std::vector<Token> tokens(seq.tokens().begin(), seq.tokens().end());
    tokens.resize(target_len, kPadToken);
    return EncodedSequence(std::move(tokens));
}

std::vector<std::int64_t> draw_offsets(Rng& rng, std::int64_t max_offset, std::size_t count) {
    std::vector<std::int64_t> out(count);
    for (auto& o : out) o = uniform_int(rng, -max_offset, max_offset);
    return out;
}

WindowGeometry::WindowGeometry(std::size_t L, std::size_t target_len, double offset_ratio) {
    if (L < target_len) throw ValidationError("window longer than the sequence");
    max_start = L - target_len;
    center = max_start / 2;
    max_offset = static_cast<std::int64_t>(std::floor(static_cast<double>(max_start) * offset_ratio));
}

std::size_t WindowGeometry::start_for(std::int64_t offset) const {
    std::int64_t start = static_cast<std::int64_t>(center) + offset;
    if (start < 0) start = 0;
    if (start > static_cast<std::int64_t>(max_start)) start = static_cast<std::int64_t>(max_start);
    return static_cast<std::size_t>(start);
}

double WindowGeometry::offset_penalty(std::int64_t offset) const {
    if (max_offset <= 0) return 0.0;
    return static_cast<double>(offset < 0 ? -offset : offset) / static_cast<double>(max_offset);
}

Crop basic_crop(const EncodedSequence& seq, std::size_t target_len) {
    if (target_len == 0) throw ValidationError("target_len must be >= 1");
    if (seq.length() <= target_len) return {pad_or_sample(seq, target_len), std::nullopt};
    const std::size_t start = (seq.length() - target_len) / 2;
    return {seq.slice(start, target_len), start};
}

Crop random_crop(const EncodedSequence& seq, const CropConfig& cfg) {
    cfg.validate();
    if (seq.length() <= cfg.target_len) return {pad_or_sample(seq, cfg.target_len), std::nullopt};
    WindowGeometry geo(seq.length(), cfg.target_len, cfg.offset_ratio);
    Rng rng(cfg.seed);
    const std::size_t start = geo.start_for(uniform_int(rng, -geo.max_offset, geo.max_offset));
    return {seq.slice(start, cfg.target_len), start};
}

namespace {

// Scores candidates with `diff(window)` and returns the lowest-index minimiser
// of alpha*diff + beta*offset_penalty.
template <typename Diff>
Crop best_scoring_window(const EncodedSequence& seq, const CropConfig& cfg, Diff&& diff) {
    WindowGeometry geo(seq.length(), cfg.target_len, cfg.offset_ratio);
    Rng rng(cfg.seed);
    const auto offsets = draw_offsets(rng, geo.max_offset, cfg.num_candidates);

    double best_score = std::numeric_limits<double>::infinity();
    std::size_t best_start = geo.start_for(offsets.front());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        const std::size_t start = geo.start_for(offsets[i]);
        const double score = cfg.alpha * diff(seq.tokens().subspan(start, cfg.target_len)) +
                             cfg.beta * geo.offset_penalty(offsets[i]);
        if (score < best_score) {
            best_score = score;
            best_start = start;
        }
    }
    return {seq.slice(best_start, cfg.target_len), best_start};
}

}  // namespace

Crop entropy_crop(const EncodedSequence& seq, const CropConfig& cfg, double full_entropy) {
    cfg.validate();
    if (seq.length() <= cfg.target_len) return {seq, std::nullopt};
    if (cfg.target_len < cfg.n) throw ValidationError("target_len must hold at least one n-tuple");
    return best_scoring_window(seq, cfg, [&](std::span<const Token> window) {
        const auto fv = tuple_counts(window, cfg.n);
        const double h = fv.total() > 0 ? block_entropy(fv) : 0.0;
        return std::abs(h - full_entropy);
    });
}

Crop ratio_crop(const EncodedSequence& seq, const CropConfig& cfg, double ratio_whole_seq,
                const EntropyDistribution& dist) {
    cfg.validate();
    const auto& m = dist.meta();
    if (m.T != cfg.T || m.n != cfg.n || m.N != cfg.N) {
        throw ValidationError("ratio crop needs the (T, n, N) distribution it scores against");
    }
    if (seq.length() <= cfg.target_len) return {pad_or_sample(seq, cfg.target_len), std::nullopt};
    if (cfg.target_len < cfg.T * cfg.N) {
        throw ValidationError("target_len " + std::to_string(cfg.target_len) + " is shorter than N*T = " +
                              std::to_string(cfg.T * cfg.N) + "; windows could not be ranked");
    }
    return best_scoring_window(seq, cfg, [&](std::span<const Token> window) {
        const EncodedSequence w(std::vector<Token>(window.begin(), window.end()));
        return std::abs(calculate_ratio(w, dist).value - ratio_whole_seq);
    });
}

std::optional<std::size_t> CompressorCache::lookup(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void CompressorCache::insert(const std::string& key, std::size_t length) {
    std::lock_guard lock(mu_);
    if (entries_.size() < max_size_) entries_.emplace(key, length);
}

std::size_t CompressorCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

std::size_t CompressorCache::hits() const {
    std::lock_guard lock(mu_);
    return hits_;
}

std::size_t CompressorCache::misses() const {
    std::lock_guard lock(mu_);
    return misses_;
}

std::size_t deflate_length(std::span<const std::uint8_t> bytes) {
    z_stream zs{};
    // Negative window bits: raw DEFLATE, no zlib header or checksum.
    if (deflateInit2(&zs, 1, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw std::runtime_error("deflateInit2 failed");
    }
    std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(bytes.size())));
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    const std::size_t produced = zs.total_out;
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw std::runtime_error("deflate did not finish");
    return produced;
}

std::size_t compress_subchunk(std::span<const Token> chunk, CompressorCache& cache) {
    if (chunk.empty()) return 0;
    std::string packed(chunk.begin(), chunk.end());
    if (auto hit = cache.lookup(packed)) return *hit;
    const std::size_t len = deflate_length(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(packed.data()), packed.size()));
    cache.insert(packed, len);
    return len;
}

Crop kolmogorov_crop(const EncodedSequence& seq, const CropConfig& cfg, CompressorCache& cache, ExecMode mode,
                     unsigned threads) {
    cfg.validate();
    if (seq.length() <= cfg.target_len) return {seq, std::nullopt};
    WindowGeometry geo(seq.length(), cfg.target_len, cfg.offset_ratio);
    Rng rng(cfg.seed);
    const auto offsets = draw_offsets(rng, geo.max_offset, cfg.num_candidates);

    std::vector<std::size_t> starts(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) starts[i] = geo.start_for(offsets[i]);

    std::vector<std::size_t> lengths(starts.size());
    auto score = [&](std::size_t i) { lengths[i] = compress_subchunk(seq.tokens().subspan(starts[i], cfg.target_len), cache); };
    if (mode == ExecMode::Parallel) {
        parallel_for(starts.size(), threads, score);
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i) score(i);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < lengths.size(); ++i) {
        const bool better = cfg.pick == Pick::Max ? lengths[i] > lengths[best] : lengths[i] < lengths[best];
        if (better) best = i;
    }
    return {seq.slice(starts[best], cfg.target_len), starts[best]};
}

}  // namespace entrank
