#include "entrank/distribution.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "entrank/errors.hpp"
#include "entrank/parallel.hpp"

namespace entrank {

namespace {

using ExponentVec = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

const HighFloat& log2_of(std::uint64_t v) {
    static std::shared_mutex mu;
    static std::map<std::uint64_t, HighFloat> table;
    {
        std::shared_lock lock(mu);
        if (auto it = table.find(v); it != table.end()) return it->second;
    }
    static const HighFloat ln2 = boost::multiprecision::log(HighFloat(2));
    HighFloat val = boost::multiprecision::log(HighFloat(v)) / ln2;
    std::unique_lock lock(mu);
    // std::map references stay valid across inserts.
    return table.emplace(v, std::move(val)).first->second;
}

// Adds weight * v_q(a) to e_q for every prime q dividing a.
void add_factorization(std::map<std::uint32_t, std::uint64_t>& acc, std::uint64_t a, std::uint64_t weight) {
    for (std::uint64_t q = 2; q * q <= a; ++q) {
        std::uint64_t e = 0;
        while (a % q == 0) {
            a /= q;
            ++e;
        }
        if (e) acc[static_cast<std::uint32_t>(q)] += e * weight;
    }
    if (a > 1) acc[static_cast<std::uint32_t>(a)] += weight;
}

EntropyKey key_from_counts(const std::vector<std::uint64_t>& counts) {
    std::map<std::uint32_t, std::uint64_t> acc;
    std::uint64_t c = 0;
    for (auto a : counts) {
        c += a;
        if (a > 1) add_factorization(acc, a, a);
    }
    EntropyKey key;
    key.c = c;
    key.blocks = 1;
    key.exponents.assign(acc.begin(), acc.end());
    return key;
}

// Per-value exponent contributions for a fixed c; avoids repeated trial
// division inside build_distribution's hot loop.
class ExponentTable {
public:
    explicit ExponentTable(std::uint32_t c) : rows_(c + 1) {
        for (std::uint32_t a = 2; a <= c; ++a) {
            std::map<std::uint32_t, std::uint64_t> acc;
            add_factorization(acc, a, a);
            rows_[a].assign(acc.begin(), acc.end());
        }
    }

    EntropyKey key(const std::vector<std::uint32_t>& parts, std::uint64_t c) const {
        std::map<std::uint32_t, std::uint64_t> acc;
        for (auto p : parts) {
            for (const auto& [q, e] : rows_[p]) acc[q] += e;
        }
        EntropyKey k;
        k.c = c;
        k.exponents.assign(acc.begin(), acc.end());
        return k;
    }

private:
    std::vector<ExponentVec> rows_;
};

using KeyCounts = std::unordered_map<EntropyKey, BigInt, EntropyKeyHash>;

BigInt pow_big(const BigInt& base, std::uint64_t exp) {
    BigInt result = 1;
    for (std::uint64_t i = 0; i < exp; ++i) result *= base;
    return result;
}

EntropyDistribution from_counts(DistributionMeta meta, KeyCounts counts) {
    std::vector<DistributionEntry> entries;
    entries.reserve(counts.size());
    for (auto& [key, count] : counts) entries.push_back({key, std::move(count), {}});
    return EntropyDistribution(std::move(meta), std::move(entries));
}

}  // namespace

EntropyKey EntropyKey::merged(const EntropyKey& other) const {
    if (c != other.c) throw ValidationError("cannot merge entropy keys with different tuple totals");
    EntropyKey out;
    out.c = c;
    out.blocks = blocks + other.blocks;
    auto a = exponents.begin(), b = other.exponents.begin();
    while (a != exponents.end() || b != other.exponents.end()) {
        if (b == other.exponents.end() || (a != exponents.end() && a->first < b->first)) {
            out.exponents.push_back(*a++);
        } else if (a == exponents.end() || b->first < a->first) {
            out.exponents.push_back(*b++);
        } else {
            out.exponents.emplace_back(a->first, a->second + b->second);
            ++a;
            ++b;
        }
    }
    return out;
}

std::string EntropyKey::canonical() const {
    if (exponents.empty()) return "-";
    std::string s;
    for (const auto& [q, e] : exponents) {
        if (!s.empty()) s += ',';
        s += std::to_string(q) + ':' + std::to_string(e);
    }
    return s;
}

std::vector<std::pair<std::uint32_t, std::uint64_t>> EntropyKey::parse_exponents(const std::string& text) {
    ExponentVec out;
    if (text == "-") return out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ValidationError("malformed exponent entry '" + item + "'");
        try {
            std::size_t used_q = 0, used_e = 0;
            auto q = std::stoull(item.substr(0, colon), &used_q);
            auto e = std::stoull(item.substr(colon + 1), &used_e);
            if (used_q != colon || used_e != item.size() - colon - 1 || q < 2 || e == 0) throw std::invalid_argument(item);
            if (!out.empty() && out.back().first >= q) throw std::invalid_argument(item);
            out.emplace_back(static_cast<std::uint32_t>(q), e);
        } catch (const std::logic_error&) {
            throw ValidationError("malformed exponent entry '" + item + "'");
        }
    }
    return out;
}

HighFloat EntropyKey::value() const {
    if (c == 0) throw ValidationError("entropy key with c = 0 has no value");
    HighFloat weighted = 0;
    for (const auto& [q, e] : exponents) weighted += HighFloat(e) * log2_of(q);
    HighFloat v = log2_of(c) - weighted / HighFloat(c * blocks);
    return v < 0 ? HighFloat(0) : v;
}

std::size_t EntropyKeyHash::operator()(const EntropyKey& k) const noexcept {
    std::size_t h = std::hash<std::uint64_t>{}(k.c) ^ (std::hash<std::uint64_t>{}(k.blocks) << 1);
    for (const auto& [q, e] : k.exponents) {
        h ^= std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(q) << 40) ^ e) + 0x9e3779b97f4a7c15ULL +
             (h << 6) + (h >> 2);
    }
    return h;
}

EntropyKey entropy_key(const std::vector<std::uint32_t>& parts) {
    return key_from_counts(std::vector<std::uint64_t>(parts.begin(), parts.end()));
}

EntropyKey entropy_key(const FrequencyVector& fv) { return key_from_counts(fv.sorted_counts()); }

EntropyDistribution::EntropyDistribution(DistributionMeta meta, std::vector<DistributionEntry> entries)
    : meta_(std::move(meta)), entries_(std::move(entries)) {
    for (auto& e : entries_) {
        if (e.key.c != meta_.c || e.key.blocks != meta_.N) {
            throw ValidationError("entropy key does not match distribution metadata");
        }
        e.value = e.key.value();
    }
    std::sort(entries_.begin(), entries_.end(), [](const DistributionEntry& a, const DistributionEntry& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.key < b.key;
    });
    cumulative_.reserve(entries_.size());
    BigInt running = 0;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].count <= 0) throw ValidationError("distribution counts must be positive");
        if (i > 0 && entries_[i].key == entries_[i - 1].key) throw ValidationError("duplicate entropy key");
        running += entries_[i].count;
        cumulative_.push_back(running);
    }
    total_ = running;
}

double EntropyDistribution::min_entropy() const {
    return entries_.empty() ? 0.0 : entries_.front().value.convert_to<double>();
}

double EntropyDistribution::max_entropy() const {
    return entries_.empty() ? 0.0 : entries_.back().value.convert_to<double>();
}

std::optional<std::size_t> EntropyDistribution::find(const EntropyKey& key) const {
    if (key.c != meta_.c || key.blocks != meta_.N || key.c == 0) return std::nullopt;
    const HighFloat v = key.value();
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<const HighFloat&, const EntropyKey&>(v, key),
                               [](const DistributionEntry& e, const auto& probe) {
                                   if (e.value != probe.first) return e.value < probe.first;
                                   return e.key < probe.second;
                               });
    if (it != entries_.end() && it->key == key) return static_cast<std::size_t>(it - entries_.begin());
    return std::nullopt;
}

std::optional<std::size_t> EntropyDistribution::last_at_or_below(double bits, double tol) const {
    const HighFloat limit = HighFloat(bits) + HighFloat(tol);
    auto it = std::upper_bound(entries_.begin(), entries_.end(), limit,
                               [](const HighFloat& v, const DistributionEntry& e) { return v < e.value; });
    if (it == entries_.begin()) return std::nullopt;
    return static_cast<std::size_t>(it - entries_.begin()) - 1;
}

BigInt EntropyDistribution::expected_total() const {
    return pow_big(meta_.lambda, meta_.c * meta_.N);
}

EntropyDistribution build_distribution(std::size_t T, unsigned n, const BuildOptions& opts) {
    BlockSpec spec(T, n);
    const std::uint64_t c64 = spec.tuples_per_block();
    if (c64 > UINT32_MAX) throw ResourceGuardError("tuple count per block is too large");
    const auto c = static_cast<std::uint32_t>(c64);

    DistributionMeta meta;
    meta.T = T;
    meta.n = n;
    meta.N = 1;
    meta.lambda = BigInt(1) << (2 * n);
    meta.c = c;

    const std::uint64_t max_parts = meta.lambda < c ? meta.lambda.convert_to<std::uint64_t>() : c;
    const std::uint64_t num_partitions = count_partitions(c, max_parts);
    if (num_partitions > opts.partition_cap) {
        std::ostringstream msg;
        msg << "refusing to build the T=" << T << ", n=" << n << " distribution: " << num_partitions
            << " partitions of c=" << c << " into at most " << max_parts << " parts exceeds the cap of "
            << opts.partition_cap;
        throw ResourceGuardError(msg.str());
    }

    const WordCounter words(c, meta.lambda);
    const ExponentTable exponents(c);

    // One work item per value of the largest part; per-worker maps are
    // merged afterwards so accumulation is order independent.
    std::vector<KeyCounts> partial(c);
    parallel_for(c, opts.threads, [&](std::size_t idx) {
        const auto first = static_cast<std::uint32_t>(c - idx);
        KeyCounts& local = partial[idx];
        PartitionGenerator rest(c - first, max_parts - 1, first);
        std::vector<std::uint32_t> parts;
        while (rest.next()) {
            parts.clear();
            parts.push_back(first);
            parts.insert(parts.end(), rest.parts().begin(), rest.parts().end());
            local[exponents.key(parts, c)] += words(parts);
        }
    });

    KeyCounts merged;
    for (auto& local : partial) {
        for (auto& [key, count] : local) merged[key] += count;
        local.clear();
    }
    return from_counts(std::move(meta), std::move(merged));
}

EntropyDistribution convolve_mean(const EntropyDistribution& dist, std::size_t N, const BuildOptions& opts) {
    if (N == 0) throw ValidationError("block count N must be >= 1");
    if (dist.meta().N != 1) throw ValidationError("convolve_mean expects a single-block distribution");
    if (N == 1) return dist;

    KeyCounts current;
    for (const auto& e : dist.entries()) current[e.key] = e.count;
    for (std::size_t step = 1; step < N; ++step) {
        KeyCounts next;
        for (const auto& [key, count] : current) {
            for (const auto& e : dist.entries()) {
                next[key.merged(e.key)] += count * e.count;
                if (next.size() > opts.support_cap) {
                    std::ostringstream msg;
                    msg << "refusing to convolve to N=" << N << ": support exceeds the cap of " << opts.support_cap
                        << " distinct means";
                    throw ResourceGuardError(msg.str());
                }
            }
        }
        current = std::move(next);
    }

    DistributionMeta meta = dist.meta();
    meta.N = N;
    return from_counts(std::move(meta), std::move(current));
}

namespace {

RankRatio ratio_at(const EntropyDistribution& dist, std::optional<std::size_t> idx) {
    RankRatio r;
    if (dist.total() == 0) throw ValidationError("empty distribution");
    BigInt num = idx ? dist.cumulative(*idx) : BigInt(0);
    r.exact = Rational(num, dist.total());
    r.value = r.exact.convert_to<double>();
    return r;
}

}  // namespace

RankRatio rank_ratio(const EntropyValue& observed, const EntropyDistribution& dist) {
    const auto& m = dist.meta();
    if (observed.T != m.T || observed.n != m.n || observed.N != m.N) {
        std::ostringstream msg;
        msg << "entropy measured at (T=" << observed.T << ", n=" << observed.n << ", N=" << observed.N
            << ") cannot be ranked against the (T=" << m.T << ", n=" << m.n << ", N=" << m.N << ") distribution";
        throw ValidationError(msg.str());
    }
    return ratio_at(dist, dist.last_at_or_below(observed.bits, kRankTolerance));
}

RankRatio rank_ratio(const EntropyKey& observed, const EntropyDistribution& dist) {
    auto idx = dist.find(observed);
    if (!idx) throw ValidationError("entropy key " + observed.canonical() + " is not in the distribution support");
    return ratio_at(dist, idx);
}

RankRatio calculate_ratio(const EncodedSequence& seq, const EntropyDistribution& dist) {
    const auto& m = dist.meta();
    if (seq.length() / m.T < m.N) {
        throw ValidationError("sequence of length " + std::to_string(seq.length()) + " has fewer than N=" +
                              std::to_string(m.N) + " full blocks of length T=" + std::to_string(m.T));
    }
    std::optional<EntropyKey> key;
    bool exact = true;
    double sum = 0.0;
    for (std::size_t b = 0; b < m.N; ++b) {
        auto fv = tuple_counts(seq.tokens().subspan(b * m.T, m.T), m.n);
        sum += block_entropy(fv);
        if (fv.total() != m.c) {
            exact = false;
            continue;
        }
        if (exact) {
            auto k = entropy_key(fv);
            key = key ? key->merged(k) : k;
        }
    }
    if (exact) return rank_ratio(*key, dist);
    return rank_ratio(EntropyValue{sum / static_cast<double>(m.N), m.T, m.n, m.N}, dist);
}

RankRatio calculate_ratio(const EncodedSequence& seq, std::size_t T, unsigned n, std::size_t N,
                          const BuildOptions& opts) {
    BlockSpec spec(T, n, N);
    if (seq.length() / T < N) {
        throw ValidationError("sequence of length " + std::to_string(seq.length()) + " has fewer than N=" +
                              std::to_string(N) + " full blocks of length T=" + std::to_string(T));
    }
    return calculate_ratio(seq, convolve_mean(build_distribution(T, n, opts), N, opts));
}

std::vector<CalibrationPoint> calibration_check(const EntropyDistribution& dist, const std::vector<double>& t_grid) {
    std::vector<CalibrationPoint> out;
    out.reserve(t_grid.size());
    const auto& entries = dist.entries();
    for (double t : t_grid) {
        const Rational tr = to_rational(t);
        // F is increasing along entries; find the last entry with F <= t.
        std::size_t lo = 0, hi = entries.size();
        while (lo < hi) {
            std::size_t mid = lo + (hi - lo) / 2;
            if (Rational(dist.cumulative(mid), dist.total()) <= tr) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        CalibrationPoint p;
        p.t = t;
        p.probability = lo == 0 ? Rational(0) : Rational(dist.cumulative(lo - 1), dist.total());
        p.within_bound = p.probability <= tr;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace entrank
