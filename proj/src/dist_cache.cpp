#include "entrank/dist_cache.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "entrank/errors.hpp"

namespace entrank {

namespace {

constexpr const char* kMagic = "entrank-dist v1";

std::uint64_t parse_field(const std::string& token, const std::string& name) {
    const std::string prefix = name + "=";
    if (token.rfind(prefix, 0) != 0) throw ValidationError("cache metadata: expected " + prefix + "<int>, got '" + token + "'");
    try {
        std::size_t used = 0;
        auto v = std::stoull(token.substr(prefix.size()), &used);
        if (used != token.size() - prefix.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::logic_error&) {
        throw ValidationError("cache metadata: bad integer in '" + token + "'");
    }
}

BigInt parse_big(const std::string& text, const std::string& what) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ValidationError("cache: bad " + what + " '" + text + "'");
    }
    return BigInt(text);
}

}  // namespace

void write_distribution(std::ostream& out, const EntropyDistribution& dist) {
    const auto& m = dist.meta();
    out << kMagic << '\n';
    out << "T=" << m.T << " n=" << m.n << " N=" << m.N << " lambda=" << m.lambda << " c=" << m.c << '\n';
    out << std::setprecision(17) << std::defaultfloat;
    for (const auto& e : dist.entries()) {
        out << e.value.convert_to<double>() << ' ' << e.key.canonical() << ' ' << e.count << '\n';
    }
    out << "total " << dist.total() << '\n';
}

EntropyDistribution read_distribution(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kMagic) throw ValidationError("cache: missing '" + std::string(kMagic) + "' header");
    if (!std::getline(in, line)) throw ValidationError("cache: missing metadata line");

    DistributionMeta meta;
    {
        std::istringstream ls(line);
        std::string t, n, N, lambda, c;
        if (!(ls >> t >> n >> N >> lambda >> c)) throw ValidationError("cache: malformed metadata line");
        meta.T = parse_field(t, "T");
        meta.n = static_cast<unsigned>(parse_field(n, "n"));
        meta.N = parse_field(N, "N");
        if (lambda.rfind("lambda=", 0) != 0) throw ValidationError("cache metadata: expected lambda=<int>");
        meta.lambda = parse_big(lambda.substr(7), "lambda");
        meta.c = parse_field(c, "c");
        BlockSpec check(meta.T, meta.n, meta.N);
        if (meta.c != check.tuples_per_block() || meta.lambda != (BigInt(1) << (2 * meta.n))) {
            throw ValidationError("cache: metadata is inconsistent (c or lambda do not follow from T and n)");
        }
    }

    std::vector<DistributionEntry> entries;
    std::optional<BigInt> declared_total;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string first, second, third;
        ls >> first >> second;
        if (first == "total") {
            declared_total = parse_big(second, "total");
            continue;
        }
        if (declared_total) throw ValidationError("cache: data after the total line at line " + std::to_string(lineno));
        if (!(ls >> third)) throw ValidationError("cache: malformed entry at line " + std::to_string(lineno));

        DistributionEntry e;
        e.key.c = meta.c;
        e.key.blocks = meta.N;
        e.key.exponents = EntropyKey::parse_exponents(second);
        e.count = parse_big(third, "count");
        const double recorded = std::stod(first);
        const double recomputed = e.key.value().convert_to<double>();
        if (std::abs(recorded - recomputed) > 1e-12 * std::max(1.0, std::abs(recomputed))) {
            throw ValidationError("cache: entropy column disagrees with its key at line " + std::to_string(lineno));
        }
        entries.push_back(std::move(e));
    }
    if (!declared_total) throw ValidationError("cache: missing total line");

    EntropyDistribution dist(std::move(meta), std::move(entries));
    if (dist.total() != *declared_total) throw ValidationError("cache: entry counts do not sum to the declared total");
    return dist;
}

DistributionCache::DistributionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path DistributionCache::path_for(std::size_t T, unsigned n, std::size_t N) const {
    return dir_ / ("dist_T" + std::to_string(T) + "_n" + std::to_string(n) + "_N" + std::to_string(N) + ".txt");
}

std::optional<EntropyDistribution> DistributionCache::load(std::size_t T, unsigned n, std::size_t N) const {
    const auto path = path_for(T, n, N);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    auto dist = read_distribution(in);
    const auto& m = dist.meta();
    if (m.T != T || m.n != n || m.N != N) throw ValidationError("cache file " + path.string() + " holds a different (T, n, N)");
    return dist;
}

std::filesystem::path DistributionCache::store(const EntropyDistribution& dist) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());

    const auto& m = dist.meta();
    const auto final_path = path_for(m.T, m.n, m.N);
    auto tmp = final_path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        write_distribution(out, dist);
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move cache file into place at " + final_path.string());
    }
    return final_path;
}

EntropyDistribution DistributionCache::get_or_build(std::size_t T, unsigned n, std::size_t N,
                                                    const BuildOptions& opts, bool* hit) const {
    if (auto cached = load(T, n, N)) {
        if (hit) *hit = true;
        return std::move(*cached);
    }
    if (hit) *hit = false;
    EntropyDistribution base;
    if (N > 1) {
        if (auto cached_base = load(T, n, 1)) {
            base = std::move(*cached_base);
        } else {
            base = build_distribution(T, n, opts);
            store(base);
        }
    } else {
        base = build_distribution(T, n, opts);
    }
    EntropyDistribution dist = N > 1 ? convolve_mean(base, N, opts) : std::move(base);
    store(dist);
    return dist;
}

}  // namespace entrank
