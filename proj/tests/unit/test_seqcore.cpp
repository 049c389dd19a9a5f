#include "doctest.h"

#include <algorithm>
#include <array>
#include <numeric>

#include "entrank/errors.hpp"
#include "entrank/random.hpp"
#include "entrank/seqcore.hpp"

using namespace entrank;

namespace {

std::vector<Token> toks(std::initializer_list<int> v) {
    std::vector<Token> out;
    for (int x : v) out.push_back(static_cast<Token>(x));
    return out;
}

}  // namespace

TEST_CASE("encode maps ACGT to 0..3 case-insensitively") {
    CHECK(encode("AAAG") == EncodedSequence(toks({0, 0, 0, 2})));
    CHECK(encode("acgt") == EncodedSequence(toks({0, 1, 2, 3})));
    CHECK(encode("").length() == 0);
}

TEST_CASE("encode rejects non-ACGT with the offending position") {
    try {
        encode("ACGTN");
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("position 4") != std::string::npos);
    }
    CHECK_THROWS_AS(encode("AC-G"), ValidationError);
    CHECK_THROWS_AS(encode("ACR"), ValidationError);
    CHECK_THROWS_AS(encode("AC.G"), ValidationError);
}

TEST_CASE("padding '.' only accepted when allowed, and decode round-trips") {
    auto seq = encode("AC..", true);
    CHECK(seq == EncodedSequence(toks({0, 1, 4, 4})));
    CHECK(decode(seq) == "AC..");
}

TEST_CASE("EncodedSequence rejects tokens above 4") {
    CHECK_THROWS_AS(EncodedSequence(toks({0, 5})), ValidationError);
}

TEST_CASE("tuple_counts examples") {
    SUBCASE("AAAG, n=1") {
        auto fv = tuple_counts(encode("AAAG"), 1);
        CHECK(fv.total() == 4);
        CHECK(fv.count(0) == 3);
        CHECK(fv.count(2) == 1);
        CHECK(fv.count(1) == 0);
    }
    SUBCASE("trailing letters dropped") {
        auto fv = tuple_counts(EncodedSequence(toks({0, 1, 2})), 2);
        CHECK(fv.total() == 1);
        CHECK(fv.count(0 * 4 + 1) == 1);
    }
    SUBCASE("tuples touching padding are skipped") {
        auto fv = tuple_counts(EncodedSequence(toks({0, 0, 4, 4})), 2);
        CHECK(fv.total() == 1);
        CHECK(fv.count(0) == 1);
        auto mixed = tuple_counts(EncodedSequence(toks({0, 4, 1, 1})), 2);
        CHECK(mixed.total() == 1);
        CHECK(mixed.count(1 * 4 + 1) == 1);
    }
    SUBCASE("big-endian tuple identity") {
        auto fv = tuple_counts(encode("GT"), 2);
        CHECK(fv.count(2 * 4 + 3) == 1);
    }
    SUBCASE("wide tuples beyond 64 bits of identity") {
        std::string s(40, 'T');
        auto fv = tuple_counts(encode(s), 40);
        CHECK(fv.total() == 1);
        CHECK(fv.nonzero().size() == 1);
    }
}

TEST_CASE("tuple_counts totals equal floor(L/n) without padding") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto L = static_cast<std::size_t>(uniform_int(rng, 0, 300));
        const auto n = static_cast<unsigned>(uniform_int(rng, 1, 8));
        auto seq = random_sequence(L, rng);
        CHECK(tuple_counts(seq, n).total() == L / n);
    }
}

TEST_CASE("tuple_counts is permutation covariant") {
    Rng rng(11);
    std::array<Token, 4> perm{0, 1, 2, 3};
    for (int trial = 0; trial < 100; ++trial) {
        std::shuffle(perm.begin(), perm.end(), rng);
        auto seq = random_sequence(static_cast<std::size_t>(uniform_int(rng, 1, 200)), rng);
        std::vector<Token> mapped;
        for (Token t : seq.tokens()) mapped.push_back(perm[t]);
        const auto n = static_cast<unsigned>(uniform_int(rng, 1, 4));
        CHECK(tuple_counts(seq, n).sorted_counts() == tuple_counts(EncodedSequence(mapped), n).sorted_counts());
    }
}

TEST_CASE("split_blocks") {
    Rng rng(3);
    auto seq = random_sequence(1000, rng);
    auto blocks = split_blocks(seq, 22);
    CHECK(blocks.size() == 45);
    std::vector<Token> joined;
    for (const auto& b : blocks) {
        CHECK(b.length() == 22);
        joined.insert(joined.end(), b.tokens().begin(), b.tokens().end());
    }
    CHECK(std::equal(joined.begin(), joined.end(), seq.tokens().begin()));
    CHECK(split_blocks(random_sequence(44, rng), 22).size() == 2);
    CHECK(split_blocks(random_sequence(10, rng), 22).empty());
    CHECK_THROWS_AS(split_blocks(seq, 0), ValidationError);
}

TEST_CASE("gc_content") {
    CHECK(gc_content(EncodedSequence(toks({2, 2, 3, 3}))) == doctest::Approx(0.5));
    CHECK(gc_content(EncodedSequence(toks({0, 0, 0, 0}))) == 0.0);
    CHECK(gc_content(EncodedSequence(toks({1, 2, 1, 2}))) == 1.0);
    CHECK(gc_content(EncodedSequence(toks({1, 4, 0, 4}))) == doctest::Approx(0.5));
    CHECK_THROWS_AS(gc_content(EncodedSequence()), ValidationError);
    CHECK_THROWS_AS(gc_content(EncodedSequence(toks({4, 4}))), ValidationError);
}

TEST_CASE("BlockSpec validation") {
    BlockSpec spec(22, 3);
    CHECK(spec.tuples_per_block() == 7);
    CHECK(spec.remainder() == 1);
    CHECK_THROWS_AS(BlockSpec(2, 3), ValidationError);
    CHECK_THROWS_AS(BlockSpec(5, 0), ValidationError);
    CHECK_THROWS_AS(BlockSpec(5, 1, 0), ValidationError);
}
