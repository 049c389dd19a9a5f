#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "entrank/augment.hpp"
#include "entrank/errors.hpp"

using namespace entrank;

namespace {

EncodedSequence toks(std::vector<Token> t) { return EncodedSequence(std::move(t)); }

EncodedSequence random_seq(std::size_t len, std::uint64_t seed) {
    Rng rng(seed);
    return random_sequence(len, rng);
}

bool is_window_of(const Crop& crop, const EncodedSequence& seq, std::size_t target) {
    if (!crop.start) return false;
    if (*crop.start > seq.length() - target) return false;
    return crop.sequence == seq.slice(*crop.start, target);
}

}  // namespace

TEST_CASE("pad_or_sample") {
    auto s22 = random_seq(22, 1);
    CHECK(pad_or_sample(s22, 22) == s22);
    CHECK(pad_or_sample(toks({0, 1}), 4) == toks({0, 1, 4, 4}));
    CHECK(pad_or_sample(EncodedSequence{}, 2) == toks({4, 4}));
    CHECK_THROWS_AS(pad_or_sample(toks({0, 1, 2}), 2), ValidationError);
}

TEST_CASE("basic_crop") {
    auto s = random_seq(24, 2);
    CHECK(basic_crop(s, 24).sequence == s);
    auto c = basic_crop(s, 22);
    CHECK(c.sequence == s.slice(1, 22));
    CHECK(c.start == 1u);
    CHECK(basic_crop(toks({2, 3}), 4).sequence == toks({2, 3, 4, 4}));
}

TEST_CASE("random_crop geometry") {
    auto s = random_seq(57, 3);
    CropConfig cfg;
    cfg.offset_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        CHECK(random_crop(s, cfg).sequence == basic_crop(s, 22).sequence);
    }

    auto s30 = random_seq(30, 4);
    cfg.offset_ratio = 1.0;
    std::set<std::size_t> starts;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        cfg.seed = seed;
        auto c = random_crop(s30, cfg);
        REQUIRE(c.start);
        CHECK(is_window_of(c, s30, 22));
        starts.insert(*c.start);
    }
    CHECK(starts == std::set<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});

    auto shortseq = toks({0, 1, 2});
    CHECK(random_crop(shortseq, cfg).sequence == pad_or_sample(shortseq, 22));
}

TEST_CASE("window geometry clamps both sides") {
    WindowGeometry g(30, 22, 1.0);
    CHECK(g.center == 4);
    CHECK(g.max_offset == 8);
    CHECK(g.start_for(-8) == 0);
    CHECK(g.start_for(8) == 8);
    CHECK(g.start_for(-3) == 1);
    CHECK(g.offset_penalty(-4) == doctest::Approx(0.5));
    WindowGeometry flat(30, 22, 0.0);
    CHECK(flat.offset_penalty(0) == 0.0);
}

TEST_CASE("config validation") {
    CropConfig cfg;
    cfg.offset_ratio = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.num_candidates = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.alpha = -1;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.target_len = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("entropy_crop") {
    auto s = random_seq(200, 5);
    const double full = sequence_entropy(s.tokens(), 1);
    CropConfig cfg;
    cfg.offset_ratio = 1.0;

    SUBCASE("single candidate equals random_crop") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            cfg.seed = seed;
            CHECK(entropy_crop(s, cfg, full).sequence == random_crop(s, cfg).sequence);
        }
    }

    SUBCASE("alpha = 0 picks the smallest |offset|") {
        cfg.num_candidates = 8;
        cfg.alpha = 0.0;
        cfg.beta = 1.0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            cfg.seed = seed;
            WindowGeometry geo(s.length(), cfg.target_len, cfg.offset_ratio);
            Rng rng(seed);
            auto offs = draw_offsets(rng, geo.max_offset, cfg.num_candidates);
            std::size_t best = 0;
            for (std::size_t i = 1; i < offs.size(); ++i) {
                if (std::abs(offs[i]) < std::abs(offs[best])) best = i;
            }
            CHECK(entropy_crop(s, cfg, full).start == geo.start_for(offs[best]));
        }
    }

    SUBCASE("homogeneous input returns the first candidate") {
        EncodedSequence allA(std::vector<Token>(100, 0));
        cfg.num_candidates = 10;
        cfg.seed = 9;
        WindowGeometry geo(100, cfg.target_len, cfg.offset_ratio);
        Rng rng(9);
        auto offs = draw_offsets(rng, geo.max_offset, cfg.num_candidates);
        CHECK(entropy_crop(allA, cfg, 0.0).start == geo.start_for(offs[0]));
    }

    SUBCASE("returns the score minimiser among sampled windows") {
        cfg.num_candidates = 16;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            cfg.seed = seed;
            auto got = entropy_crop(s, cfg, full);
            const double got_diff = std::abs(sequence_entropy(got.sequence.tokens(), 1) - full);
            WindowGeometry geo(s.length(), cfg.target_len, cfg.offset_ratio);
            Rng rng(seed);
            for (auto off : draw_offsets(rng, geo.max_offset, cfg.num_candidates)) {
                auto w = s.tokens().subspan(geo.start_for(off), cfg.target_len);
                CHECK(got_diff <= std::abs(sequence_entropy(w, 1) - full));
            }
        }
    }

    SUBCASE("short input passes through") {
        auto shortseq = toks({0, 1, 2});
        CHECK(entropy_crop(shortseq, cfg, 0.0).sequence == shortseq);
    }
}

TEST_CASE("ratio_crop") {
    auto dist = build_distribution(22, 1);
    auto s = random_seq(120, 6);
    CropConfig cfg;
    cfg.offset_ratio = 1.0;
    const double whole = calculate_ratio(s, dist).value;

    SUBCASE("single candidate is the clipped random window") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            cfg.seed = seed;
            CHECK(ratio_crop(s, cfg, whole, dist).sequence == random_crop(s, cfg).sequence);
        }
    }

    SUBCASE("L = target_len is the identity") {
        auto s22 = random_seq(22, 7);
        CHECK(ratio_crop(s22, cfg, whole, dist).sequence == s22);
    }

    SUBCASE("deterministic under seed") {
        cfg.num_candidates = 6;
        cfg.seed = 42;
        auto a = ratio_crop(s, cfg, whole, dist);
        auto b = ratio_crop(s, cfg, whole, dist);
        CHECK(a.sequence == b.sequence);
        CHECK(is_window_of(a, s, 22));
    }

    SUBCASE("ratio is a monotone transform of window entropy") {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            WindowGeometry geo(s.length(), 22, 1.0);
            Rng rng(seed);
            auto offs = draw_offsets(rng, geo.max_offset, 8);
            for (std::size_t i = 0; i < offs.size(); ++i) {
                for (std::size_t j = 0; j < offs.size(); ++j) {
                    auto wi = s.slice(geo.start_for(offs[i]), 22);
                    auto wj = s.slice(geo.start_for(offs[j]), 22);
                    const double si = sequence_entropy(wi.tokens(), 1), sj = sequence_entropy(wj.tokens(), 1);
                    const double ri = calculate_ratio(wi, dist).value, rj = calculate_ratio(wj, dist).value;
                    if (si < sj - 1e-12) CHECK(ri < rj);
                }
            }
        }
    }

    SUBCASE("rejects a mismatched distribution and too-short windows") {
        CropConfig bad = cfg;
        bad.n = 2;
        CHECK_THROWS_AS(ratio_crop(s, bad, whole, dist), ValidationError);
        bad = cfg;
        bad.target_len = 10;
        CHECK_THROWS_AS(ratio_crop(s, bad, whole, dist), ValidationError);
    }
}

TEST_CASE("compress_subchunk") {
    CompressorCache cache;
    CHECK(compress_subchunk({}, cache) == 0);

    auto r = random_seq(1000, 8);
    const auto first = compress_subchunk(r.tokens(), cache);
    CHECK(cache.misses() == 1);
    CHECK(compress_subchunk(r.tokens(), cache) == first);
    CHECK(cache.hits() == 1);
    CHECK(cache.size() == 1);

    std::vector<Token> allA(1000, 0);
    CHECK(compress_subchunk(allA, cache) < first);

    CompressorCache tiny(1);
    compress_subchunk(r.tokens(), tiny);
    compress_subchunk(allA, tiny);
    CHECK(tiny.size() == 1);
}

TEST_CASE("kolmogorov_crop") {
    CompressorCache cache;
    CropConfig cfg;
    cfg.offset_ratio = 1.0;

    SUBCASE("short input returned unchanged") {
        auto shortseq = toks({0, 1, 2});
        CHECK(kolmogorov_crop(shortseq, cfg, cache).sequence == shortseq);
    }

    SUBCASE("single candidate regardless of pick") {
        auto s = random_seq(100, 10);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            cfg.seed = seed;
            cfg.pick = Pick::Max;
            auto a = kolmogorov_crop(s, cfg, cache);
            cfg.pick = Pick::Min;
            auto b = kolmogorov_crop(s, cfg, cache);
            CHECK(a.sequence == b.sequence);
            CHECK(a.sequence == random_crop(s, cfg).sequence);
        }
    }

    SUBCASE("pick=max prefers the random half") {
        std::vector<Token> half(200, 0);
        auto tail = random_seq(200, 11);
        half.insert(half.end(), tail.tokens().begin(), tail.tokens().end());
        EncodedSequence s(std::move(half));
        cfg.target_len = 100;
        cfg.num_candidates = 16;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            cfg.seed = seed;
            cfg.pick = Pick::Max;
            auto got = kolmogorov_crop(s, cfg, cache);
            REQUIRE(got.start);
            const std::size_t in_random = std::min<std::size_t>(100, *got.start + 100 > 200 ? *got.start + 100 - 200 : 0);
            CHECK(in_random > 50);
            // Direct scoring: nothing sampled compresses longer.
            WindowGeometry geo(s.length(), 100, 1.0);
            Rng rng(seed);
            const auto best = deflate_length(std::span<const std::uint8_t>(got.sequence.tokens()));
            for (auto off : draw_offsets(rng, geo.max_offset, cfg.num_candidates)) {
                CHECK(deflate_length(s.tokens().subspan(geo.start_for(off), 100)) <= best);
            }
        }
    }

    SUBCASE("parallel mode agrees with sequential") {
        auto s = random_seq(300, 12);
        cfg.num_candidates = 12;
        for (auto pick : {Pick::Max, Pick::Min}) {
            cfg.pick = pick;
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                cfg.seed = seed;
                CompressorCache c1, c2;
                auto a = kolmogorov_crop(s, cfg, c1, ExecMode::Sequential);
                auto b = kolmogorov_crop(s, cfg, c2, ExecMode::Parallel, 4);
                CHECK(a.sequence == b.sequence);
                CHECK(a.start == b.start);
            }
        }
    }

    SUBCASE("ties go to the lowest index") {
        EncodedSequence allA(std::vector<Token>(80, 0));
        cfg.num_candidates = 6;
        cfg.seed = 3;
        WindowGeometry geo(80, cfg.target_len, 1.0);
        Rng rng(3);
        auto offs = draw_offsets(rng, geo.max_offset, 6);
        CHECK(kolmogorov_crop(allA, cfg, cache).start == geo.start_for(offs[0]));
    }
}
