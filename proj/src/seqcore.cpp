#include "entrank/seqcore.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include "entrank/errors.hpp"

namespace entrank {

EncodedSequence::EncodedSequence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (tokens_[i] > kPadToken) {
            throw ValidationError("token " + std::to_string(tokens_[i]) + " at position " +
                                  std::to_string(i) + " is outside {0..4}");
        }
    }
}

EncodedSequence EncodedSequence::slice(std::size_t start, std::size_t len) const {
    if (start > tokens_.size() || len > tokens_.size() - start) {
        throw ValidationError("slice [" + std::to_string(start) + ", " +
                              std::to_string(start + len) + ") exceeds length " +
                              std::to_string(tokens_.size()));
    }
    return EncodedSequence(std::vector<Token>(tokens_.begin() + static_cast<std::ptrdiff_t>(start),
                                              tokens_.begin() + static_cast<std::ptrdiff_t>(start + len)));
}

BlockSpec::BlockSpec(std::size_t T_, unsigned n_, std::size_t N_) : T(T_), n(n_), N(N_) {
    if (n == 0) throw ValidationError("tuple size n must be >= 1");
    if (n > kMaxTupleSize) {
        throw ValidationError("tuple size n=" + std::to_string(n) + " exceeds the supported maximum " +
                              std::to_string(kMaxTupleSize));
    }
    if (T < n) {
        throw ValidationError("block length T=" + std::to_string(T) + " must be >= n=" + std::to_string(n));
    }
    if (N == 0) throw ValidationError("block count N must be >= 1");
}

FrequencyVector::FrequencyVector(unsigned n, std::vector<std::pair<TupleId, std::uint64_t>> nonzero)
    : n_(n), nonzero_(std::move(nonzero)) {
    std::sort(nonzero_.begin(), nonzero_.end());
    std::erase_if(nonzero_, [](const auto& e) { return e.second == 0; });
    for (const auto& [id, cnt] : nonzero_) total_ += cnt;
}

std::uint64_t FrequencyVector::count(TupleId id) const {
    auto it = std::lower_bound(nonzero_.begin(), nonzero_.end(), id,
                               [](const auto& e, TupleId v) { return e.first < v; });
    return (it != nonzero_.end() && it->first == id) ? it->second : 0;
}

std::vector<std::uint64_t> FrequencyVector::sorted_counts() const {
    std::vector<std::uint64_t> out;
    out.reserve(nonzero_.size());
    for (const auto& e : nonzero_) out.push_back(e.second);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

EncodedSequence encode(std::string_view text, bool allow_padding) {
    std::vector<Token> tokens;
    tokens.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        switch (text[i]) {
            case 'A': case 'a': tokens.push_back(0); break;
            case 'C': case 'c': tokens.push_back(1); break;
            case 'G': case 'g': tokens.push_back(2); break;
            case 'T': case 't': tokens.push_back(3); break;
            case '.':
                if (allow_padding) {
                    tokens.push_back(kPadToken);
                    break;
                }
                [[fallthrough]];
            default: {
                std::string shown = (text[i] >= 0x20 && text[i] < 0x7f)
                                        ? std::string("'") + text[i] + "'"
                                        : "byte " + std::to_string(static_cast<unsigned char>(text[i]));
                throw ValidationError("invalid nucleotide " + shown + " at position " + std::to_string(i));
            }
        }
    }
    return EncodedSequence(std::move(tokens));
}

std::string decode(const EncodedSequence& seq) {
    static constexpr char kLetters[] = {'A', 'C', 'G', 'T', '.'};
    std::string out;
    out.reserve(seq.length());
    for (Token t : seq.tokens()) out.push_back(kLetters[t]);
    return out;
}

FrequencyVector tuple_counts(std::span<const Token> tokens, unsigned n) {
    if (n == 0) throw ValidationError("tuple size n must be >= 1");
    if (n > kMaxTupleSize) throw ValidationError("tuple size n=" + std::to_string(n) + " is too large");

    const std::size_t whole = tokens.size() / n;
    std::vector<TupleId> ids;
    ids.reserve(whole);
    for (std::size_t t = 0; t < whole; ++t) {
        TupleId id = 0;
        bool padded = false;
        for (unsigned j = 0; j < n; ++j) {
            Token tok = tokens[t * n + j];
            if (tok == kPadToken) {
                padded = true;
                break;
            }
            id = (id << 2) | tok;
        }
        if (!padded) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());

    std::vector<std::pair<TupleId, std::uint64_t>> runs;
    for (std::size_t i = 0; i < ids.size();) {
        std::size_t j = i;
        while (j < ids.size() && ids[j] == ids[i]) ++j;
        runs.emplace_back(ids[i], j - i);
        i = j;
    }
    return FrequencyVector(n, std::move(runs));
}

std::vector<EncodedSequence> split_blocks(const EncodedSequence& seq, std::size_t T) {
    if (T == 0) throw ValidationError("block length T must be >= 1");
    std::vector<EncodedSequence> blocks;
    const std::size_t N = seq.length() / T;
    blocks.reserve(N);
    for (std::size_t b = 0; b < N; ++b) blocks.push_back(seq.slice(b * T, T));
    return blocks;
}

double gc_content(const EncodedSequence& seq) {
    std::size_t gc = 0;
    std::size_t real = 0;
    for (Token t : seq.tokens()) {
        if (t == kPadToken) continue;
        ++real;
        if (t == 1 || t == 2) ++gc;
    }
    if (real == 0) throw ValidationError("GC content is undefined for a sequence with no nucleotides");
    return static_cast<double>(gc) / static_cast<double>(real);
}

}  // namespace entrank
