#include <random>

#include "doctest.h"
#include "mcascade/errors.hpp"
#include "mcascade/words.hpp"

using namespace mcascade;

TEST_CASE("word_of examples") {
    CHECK(word_of(0.0, 3, 2).to_string() == "000");
    CHECK(word_of(0.625, 3, 2).to_string() == "101");
    CHECK(word_of(1.0, 2, 3).to_string() == "22");
    // half-open cells: a b-adic point belongs to the cell on its right
    CHECK(word_of(0.5, 2, 2).to_string() == "10");
    CHECK(word_of(BadicRational{1, 3}, 3, 3).to_string() == "100");
    CHECK(word_of(BadicRational{1, 1}, 2, 3).to_string() == "22");
    CHECK_THROWS_AS(word_of(1.5, 2, 2), DomainError);
    CHECK_THROWS_AS(word_of(-0.1, 2, 2), DomainError);
}

TEST_CASE("interval_of examples") {
    const BadicInterval root = interval_of(Word(2));
    CHECK(root.left == BadicRational{0, 1});
    CHECK(root.length == BadicRational{1, 1});

    const BadicInterval i = interval_of(Word::parse(2, "101"));
    CHECK(i.left == BadicRational{5, 8});
    CHECK(i.right() == BadicRational{6, 8});
    CHECK(i.contains(0.625));
    CHECK_FALSE(i.contains(0.75));

    const BadicInterval j = interval_of(Word::parse(3, "2"));
    CHECK(j.left == BadicRational{2, 3});
    CHECK(j.right() == BadicRational{1, 1});
}

TEST_CASE("successor examples") {
    CHECK(successor(Word::parse(2, "011"))->to_string() == "100");
    CHECK_FALSE(successor(Word::parse(2, "11")).has_value());
    CHECK(successor(Word::parse(3, "02"))->to_string() == "10");
}

TEST_CASE("parse and print use letters above 9") {
    const Word w = Word::parse(16, "0af3");
    CHECK(w.digits() == std::vector<int>{0, 10, 15, 3});
    CHECK(w.to_string() == "0af3");
    CHECK(w.index() == 0x0af3);
    CHECK_THROWS_AS(Word::parse(2, "012"), DomainError);
}

TEST_CASE("checked_pow and rationals") {
    CHECK(checked_pow(3, 4) == 81);
    CHECK(checked_pow(2, 63) == (std::uint64_t{1} << 63));
    CHECK_THROWS_AS(checked_pow(2, 64), DomainError);
    CHECK(BadicRational{1, 2} == BadicRational{2, 4});
    CHECK(BadicRational{1, 3} < BadicRational{4, 9});
    CHECK(BadicRational{1, 4} + BadicRational{1, 8} == BadicRational{3, 8});
}

TEST_CASE("property: round trips over random words") {
    std::mt19937_64 gen(11);
    for (int t = 0; t < 2000; ++t) {
        const int b = 2 + static_cast<int>(gen() % 35);
        const int n = static_cast<int>(gen() % 9);
        const std::uint64_t cells = checked_pow(static_cast<std::uint64_t>(b), n);
        const std::uint64_t idx = gen() % cells;
        const Word w = Word::from_index(b, n, idx);
        REQUIRE(w.length() == n);
        CHECK(w.index() == idx);
        CHECK(Word::parse(b, w.to_string()) == w);
        CHECK(word_of(project(w), n, b) == w);
        if ((b & (b - 1)) == 0) {
            // only power-of-two bases have exact double endpoints
            CHECK(word_of(project(w).value(), n, b) == w);
        }
        if (auto s = successor(w)) {
            CHECK(s->index() == idx + 1);
            CHECK(project(*s) == project(w) + interval_of(w).length);
        } else {
            CHECK(idx + 1 == cells);
        }
    }
}

TEST_CASE("property: word_of is consistent across depths") {
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        const int b = 2 + static_cast<int>(gen() % 9);
        const double x = u(gen);
        const int n = 1 + static_cast<int>(gen() % 12);
        const Word w = word_of(x, n, b);
        CHECK(interval_of(w).contains(x));
        for (int m = 0; m <= n; ++m) {
            CHECK(word_of(x, m, b) == w.prefix(m));
        }
    }
}

TEST_CASE("property: children tile the parent") {
    std::mt19937_64 gen(13);
    for (int t = 0; t < 500; ++t) {
        const int b = 2 + static_cast<int>(gen() % 7);
        const int n = static_cast<int>(gen() % 6);
        const Word w = Word::from_index(b, n, gen() % checked_pow(static_cast<std::uint64_t>(b), n));
        const BadicInterval parent = interval_of(w);
        BadicRational left = parent.left;
        for (int d = 0; d < b; ++d) {
            const BadicInterval c = interval_of(w.child(d));
            CHECK(c.left == left);
            CHECK(c.word.prefix(n) == w);
            left = c.right();
        }
        CHECK(left == parent.right());
    }
}
