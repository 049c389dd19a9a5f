#include "entrank/entropy.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "entrank/errors.hpp"
#include "entrank/parallel.hpp"
#include "entrank/random.hpp"

namespace entrank {

Rational to_rational(double x) {
    if (!std::isfinite(x)) throw ValidationError("value must be finite");
    int exp = 0;
    double mant = std::frexp(x, &exp);
    // 53-bit integer mantissa scaled by a power of two.
    auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(m);
    boost::multiprecision::cpp_int scale = 1;
    if (exp > 0) {
        scale <<= exp;
        return r * Rational(scale);
    }
    scale <<= -exp;
    return r / Rational(scale);
}

namespace {

double mean_entropy_for_blocks(std::span<const Token> tokens, std::size_t T, unsigned n) {
    const std::size_t N = tokens.size() / T;
    if (N == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
        auto fv = tuple_counts(tokens.subspan(b * T, T), n);
        if (fv.total() > 0) sum += block_entropy(fv);
    }
    return sum / static_cast<double>(N);
}

}  // namespace

double block_entropy(const FrequencyVector& fv) {
    const std::uint64_t c = fv.total();
    if (c == 0) throw ValidationError("block entropy is undefined for an empty frequency vector (c = 0)");
    const double total = static_cast<double>(c);
    double h = 0.0;
    // Summed in sorted-count order so equal count multisets give bit-identical results.
    for (const auto a : fv.sorted_counts()) {
        const double b = static_cast<double>(a) / total;
        h -= b * std::log2(b);
    }
    // Rounding can push a single-symbol block to -0.0 or tiny negatives.
    return h < 0.0 ? 0.0 : h;
}

double sequence_entropy(std::span<const Token> tokens, unsigned n) {
    return block_entropy(tuple_counts(tokens, n));
}

EntropyValue mean_block_entropy(const EncodedSequence& seq, std::size_t T, unsigned n,
                                std::size_t max_blocks) {
    BlockSpec spec(T, n);
    std::size_t N = seq.length() / T;
    if (N == 0) {
        throw ValidationError("sequence of length " + std::to_string(seq.length()) +
                              " has no full block of length T=" + std::to_string(T));
    }
    if (max_blocks != 0) {
        if (max_blocks > N) {
            throw ValidationError("sequence has " + std::to_string(N) + " full blocks, " +
                                  std::to_string(max_blocks) + " requested");
        }
        N = max_blocks;
    }
    double sum = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
        sum += block_entropy(tuple_counts(seq.tokens().subspan(b * T, T), n));
    }
    return EntropyValue{sum / static_cast<double>(N), spec.T, spec.n, N};
}

ConcatBound concat_bound(std::size_t L_o, double S_o, std::size_t L_v, double S_v, std::size_t T,
                         unsigned n) {
    BlockSpec spec(T, n);
    if (L_o < T || L_v < T) throw ValidationError("both sequences need at least one full block");
    if (S_o < 0.0 || S_v < 0.0) throw ValidationError("entropies must be non-negative");

    const std::size_t N_o = L_o / T, r_o = L_o % T;
    const std::size_t N_v = L_v / T, r_v = L_v % T;
    const std::size_t N = N_o + N_v;
    const Rational so = to_rational(S_o), sv = to_rational(S_v);

    ConcatBound out;
    out.block_mean_exact = (Rational(N_o) * so + Rational(N_v) * sv) / Rational(N);
    out.theta_exact = (Rational(L_o) * so + Rational(L_v) * sv) / Rational(L_o + L_v);
    // log2(4^n) = 2n exactly.
    out.bound_exact = Rational(2 * n * (r_o + r_v)) / Rational(T * N);
    out.block_mean = out.block_mean_exact.convert_to<double>();
    out.theta = out.theta_exact.convert_to<double>();
    out.bound = out.bound_exact.convert_to<double>();
    return out;
}

std::vector<ProfilePoint> monte_carlo_profiles(const ProfileConfig& cfg) {
    if (cfg.L == 0) throw ValidationError("profile sequence length must be >= 1");
    if (cfg.num_sequences == 0) throw ValidationError("profile needs at least one sequence");

    std::vector<std::size_t> params;
    if (cfg.sweep == SweepKind::BlockCount) {
        if (cfg.n == 0 || cfg.n > kMaxTupleSize) throw ValidationError("invalid tuple size for block-count sweep");
        for (std::size_t N = 1; N <= cfg.L; ++N) params.push_back(N);
    } else {
        if (cfg.n_max == 0 || cfg.n_max > kMaxTupleSize) {
            throw ValidationError("n_max must lie in [1, " + std::to_string(kMaxTupleSize) + "]");
        }
        if (cfg.n_max > cfg.L) throw ValidationError("n_max exceeds the sequence length");
        for (unsigned n = 1; n <= cfg.n_max; ++n) params.push_back(n);
    }

    // per_seq[s][p]: one row per sequence, summed in sequence order afterwards.
    std::vector<std::vector<double>> per_seq(cfg.num_sequences, std::vector<double>(params.size()));
    parallel_for(cfg.num_sequences, cfg.threads, [&](std::size_t s) {
        Rng rng(mix_seed(cfg.seed, s));
        const EncodedSequence seq = random_sequence(cfg.L, rng);
        for (std::size_t p = 0; p < params.size(); ++p) {
            if (cfg.sweep == SweepKind::BlockCount) {
                per_seq[s][p] = mean_entropy_for_blocks(seq.tokens(), cfg.L / params[p], cfg.n);
            } else {
                per_seq[s][p] = sequence_entropy(seq.tokens(), static_cast<unsigned>(params[p]));
            }
        }
    });

    std::vector<ProfilePoint> out;
    out.reserve(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
        double sum = 0.0;
        for (const auto& row : per_seq) sum += row[p];
        out.push_back({params[p], sum / static_cast<double>(cfg.num_sequences)});
    }
    return out;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points, bool full_precision) {
    out << "param,mean_entropy\n";
    if (full_precision) {
        out << std::defaultfloat << std::setprecision(17);
    } else {
        out << std::fixed << std::setprecision(6);
    }
    for (const auto& p : points) out << p.param << ',' << p.mean_entropy << '\n';
}

}  // namespace entrank
