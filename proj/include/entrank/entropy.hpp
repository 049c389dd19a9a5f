#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "entrank/seqcore.hpp"

namespace entrank {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational value of a finite double.
Rational to_rational(double x);

/// Entropy in bits together with the (T, n, N) it was measured under.
struct EntropyValue {
    double bits = 0.0;
    std::size_t T = 0;
    unsigned n = 1;
    std::size_t N = 1;
};

/// Base-2 Shannon entropy of the relative tuple frequencies. Zero-count
/// tuples contribute nothing. Throws ValidationError when c = 0.
double block_entropy(const FrequencyVector& fv);

/// Shannon entropy of a whole token range taken as a single block.
double sequence_entropy(std::span<const Token> tokens, unsigned n);

/// Arithmetic mean of block entropies over the full T-blocks of seq.
/// max_blocks = 0 uses every full block, otherwise only the first max_blocks.
EntropyValue mean_block_entropy(const EncodedSequence& seq, std::size_t T, unsigned n,
                                std::size_t max_blocks = 0);

/// Both sides of the concatenation identity for w = o || v, plus the
/// worst-case gap between the length-weighted and block-weighted means.
/// Computed exactly over the rationals (doubles are exact rationals); the
/// double fields are roundings of the exact values.
struct ConcatBound {
    Rational block_mean_exact;   // (N_o S_o + N_v S_v) / N
    Rational theta_exact;        // (L_o S_o + L_v S_v) / (L_o + L_v)
    Rational bound_exact;        // log2(lambda) (r_o + r_v) / (T N)
    double block_mean = 0.0;
    double theta = 0.0;
    double bound = 0.0;

    Rational gap_exact() const { return abs(theta_exact - block_mean_exact); }
    bool holds() const { return gap_exact() <= bound_exact; }
};

ConcatBound concat_bound(std::size_t L_o, double S_o, std::size_t L_v, double S_v, std::size_t T,
                         unsigned n);

enum class SweepKind {
    BlockCount,  // N = 1..L with T = floor(L/N), n fixed
    TupleSize,   // n = 1..n_max with a single block (N = 1, T = L)
};

struct ProfileConfig {
    std::size_t L = 1000;
    std::size_t num_sequences = 50;
    SweepKind sweep = SweepKind::TupleSize;
    unsigned n = 1;          // tuple size for the block-count sweep
    unsigned n_max = 50;     // upper end of the tuple-size sweep
    std::uint64_t seed = 0;
    unsigned threads = 0;    // 0 = hardware concurrency
};

struct ProfilePoint {
    std::size_t param = 0;
    double mean_entropy = 0.0;
};

/// Monte-Carlo mean entropy profile over uniform random sequences. Blocks
/// too short to hold a single tuple contribute zero entropy.
std::vector<ProfilePoint> monte_carlo_profiles(const ProfileConfig& cfg);

/// `param,mean_entropy` CSV, 6-decimal fixed unless full_precision
/// (17 significant digits).
void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points, bool full_precision = false);

}  // namespace entrank
