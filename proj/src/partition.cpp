#include "entrank/partition.hpp"

#include <algorithm>

#include "entrank/errors.hpp"

namespace entrank {

PartitionGenerator::PartitionGenerator(std::uint32_t c, std::uint64_t max_parts, std::uint32_t max_part)
    : c_(c), max_parts_(max_parts), max_part_(max_part) {
    if (max_parts == 0 && c > 0) done_ = true;
}

bool PartitionGenerator::fill(std::size_t from, std::uint32_t remaining, std::uint32_t cap) {
    // Greedy fill with the largest allowed part gives the lexicographically
    // largest completion; feasible iff the remaining slots can absorb it.
    const std::uint64_t slots = max_parts_ - from;
    if (cap == 0) return remaining == 0;
    if (static_cast<std::uint64_t>(remaining) > slots * cap) return false;
    while (remaining > 0) {
        const std::uint32_t v = std::min(cap, remaining);
        parts_.push_back(v);
        remaining -= v;
    }
    return true;
}

bool PartitionGenerator::next() {
    if (done_) return false;
    if (!started_) {
        started_ = true;
        parts_.clear();
        if (!fill(0, c_, std::min(max_part_, c_))) {
            done_ = true;
            return false;
        }
        return true;
    }
    std::uint32_t suffix = 0;
    for (std::size_t i = parts_.size(); i-- > 0;) {
        const std::uint32_t v = parts_[i];
        if (v > 1) {
            const std::uint32_t spill = suffix + 1;
            const std::uint64_t slots = max_parts_ - (i + 1);
            if (static_cast<std::uint64_t>(spill) <= slots * (v - 1)) {
                parts_.resize(i + 1);
                parts_[i] = v - 1;
                fill(i + 1, spill, v - 1);
                return true;
            }
        }
        suffix += v;
    }
    done_ = true;
    parts_.clear();
    return false;
}

std::vector<OrderedPartition> enumerate_partitions(std::uint32_t c, std::uint64_t max_parts) {
    if (max_parts == 0) throw ValidationError("max_parts must be >= 1");
    std::vector<OrderedPartition> out;
    PartitionGenerator gen(c, max_parts);
    while (gen.next()) out.push_back({gen.parts(), c});
    return out;
}

std::uint64_t count_partitions(std::uint32_t c, std::uint64_t max_parts) {
    // Partitions into at most k parts are equinumerous with partitions whose
    // parts are at most k (conjugation).
    const std::uint64_t k = std::min<std::uint64_t>(max_parts, c);
    std::vector<std::uint64_t> ways(c + 1, 0);
    ways[0] = 1;
    for (std::uint64_t part = 1; part <= k; ++part) {
        for (std::uint64_t s = part; s <= c; ++s) {
            const std::uint64_t add = ways[s - part];
            ways[s] = (ways[s] > UINT64_MAX - add) ? UINT64_MAX : ways[s] + add;
        }
    }
    return ways[c];
}

WordCounter::WordCounter(std::uint32_t c, const BigInt& lambda) : c_(c) {
    if (lambda < 1) throw ValidationError("alphabet size must be >= 1");
    factorial_.resize(c + 1);
    factorial_[0] = 1;
    for (std::uint32_t i = 1; i <= c; ++i) factorial_[i] = factorial_[i - 1] * i;

    const std::uint32_t kmax = lambda < c ? lambda.convert_to<std::uint32_t>() : c;
    falling_.resize(kmax + 1);
    falling_[0] = 1;
    for (std::uint32_t k = 1; k <= kmax; ++k) falling_[k] = falling_[k - 1] * (lambda - (k - 1));
}

BigInt WordCounter::operator()(const std::vector<std::uint32_t>& parts) const {
    const std::size_t k = parts.size();
    if (k >= falling_.size()) {
        if (k > c_) throw ValidationError("partition has more parts than its total");
        return 0;  // more positive parts than letters
    }
    std::uint64_t sum = 0;
    BigInt denom = 1;
    BigInt gamma = 1;
    for (std::size_t i = 0; i < k;) {
        if (parts[i] == 0) throw ValidationError("partition parts must be positive");
        if (i > 0 && parts[i] > parts[i - 1]) throw ValidationError("partition parts must be non-increasing");
        std::size_t j = i;
        while (j < k && parts[j] == parts[i]) {
            sum += parts[j];
            if (sum > c_) throw ValidationError("partition sums past its total");
            denom *= factorial_[parts[j]];
            ++j;
        }
        gamma *= factorial_[j - i];
        i = j;
    }
    if (sum != c_) throw ValidationError("partition does not sum to its total");
    return falling_[k] / gamma * (factorial_[c_] / denom);
}

BigInt count_words(const std::vector<std::uint32_t>& parts, const BigInt& lambda) {
    std::uint64_t c = 0;
    for (auto p : parts) c += p;
    return WordCounter(static_cast<std::uint32_t>(c), lambda)(parts);
}

}  // namespace entrank
