#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "entrank/errors.hpp"
#include "entrank/partition.hpp"

using namespace entrank;

namespace {

using Parts = std::vector<std::uint32_t>;

std::vector<Parts> all_parts(std::uint32_t c, std::uint64_t lambda) {
    std::vector<Parts> out;
    for (auto& p : enumerate_partitions(c, lambda)) out.push_back(p.parts);
    return out;
}

// Every composition of c into at most k positive parts, sorted to shape.
std::set<Parts> brute_shapes(std::uint32_t c, std::uint32_t k) {
    std::set<Parts> out;
    std::vector<std::uint32_t> cur;
    auto rec = [&](auto&& self, std::uint32_t left) -> void {
        if (left == 0) {
            Parts s = cur;
            std::sort(s.rbegin(), s.rend());
            out.insert(s);
            return;
        }
        if (cur.size() == k) return;
        for (std::uint32_t v = 1; v <= left; ++v) {
            cur.push_back(v);
            self(self, left - v);
            cur.pop_back();
        }
    };
    rec(rec, c);
    return out;
}

}  // namespace

TEST_CASE("enumerate_partitions examples") {
    CHECK(all_parts(4, 4) == std::vector<Parts>{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}});
    CHECK(all_parts(5, 2) == std::vector<Parts>{{5}, {4, 1}, {3, 2}});
    CHECK(all_parts(0, 4) == std::vector<Parts>{{}});
    CHECK(all_parts(3, 1) == std::vector<Parts>{{3}});
    CHECK_THROWS_AS(enumerate_partitions(3, 0), ValidationError);
}

TEST_CASE("enumeration matches brute force over compositions, in decreasing lex order") {
    for (std::uint32_t c = 0; c <= 14; ++c) {
        for (std::uint32_t k : {1u, 2u, 3u, 4u, 7u, 16u}) {
            auto got = all_parts(c, k);
            CHECK(std::is_sorted(got.rbegin(), got.rend()));
            CHECK(std::adjacent_find(got.begin(), got.end()) == got.end());
            std::set<Parts> as_set(got.begin(), got.end());
            CHECK(as_set == brute_shapes(c, k));
            CHECK(count_partitions(c, k) == got.size());
        }
    }
}

TEST_CASE("bounded largest part") {
    PartitionGenerator gen(6, 3, 2);
    std::vector<Parts> got;
    while (gen.next()) got.push_back(gen.parts());
    CHECK(got == std::vector<Parts>{{2, 2, 2}});
    PartitionGenerator none(7, 3, 2);
    CHECK_FALSE(none.next());
}

TEST_CASE("count_partitions reference values") {
    CHECK(count_partitions(49, 16) == 130738);
    CHECK(count_partitions(100, 100) == 190569292ULL);
    CHECK(count_partitions(20, 4) == 108);
}

TEST_CASE("count_words examples") {
    CHECK(count_words({3, 1}, 4) == 48);
    CHECK(count_words({1, 1, 1, 1}, 4) == 24);
    CHECK(count_words({7}, 4) == 4);
    CHECK(count_words({7}, 64) == 64);
    CHECK(count_words({2, 2}, 4) == 36);
    CHECK(count_words({2, 1, 1}, 4) == 144);
    CHECK(count_words({1, 1, 1, 1, 1}, 4) == 0);  // more distinct letters than the alphabet
    CHECK_THROWS_AS(count_words({1, 3}, 4), ValidationError);
    CHECK_THROWS_AS(count_words({2, 0}, 4), ValidationError);
}

TEST_CASE("count_words agrees with brute-force word enumeration") {
    // All 4^6 words of length 6 over 4 letters, grouped by sorted shape.
    std::map<Parts, std::uint64_t> shapes;
    for (std::uint32_t w = 0; w < (1u << 12); ++w) {
        std::uint32_t f[4] = {0, 0, 0, 0};
        for (int i = 0; i < 6; ++i) ++f[(w >> (2 * i)) & 3];
        Parts p;
        for (auto x : f) if (x) p.push_back(x);
        std::sort(p.rbegin(), p.rend());
        ++shapes[p];
    }
    for (const auto& [p, num] : shapes) CHECK(count_words(p, 4) == num);
    CHECK(shapes.size() == all_parts(6, 4).size());
}

TEST_CASE("sum of word counts is lambda^c") {
    for (std::uint32_t c = 0; c <= 12; ++c) {
        for (unsigned lam : {4u, 16u, 64u}) {
            BigInt sum = 0;
            WordCounter words(c, lam);
            for (auto& p : enumerate_partitions(c, lam)) sum += words(p.parts);
            BigInt expected = 1;
            for (std::uint32_t i = 0; i < c; ++i) expected *= lam;
            CHECK(sum == expected);
        }
    }
}
