#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "freetorus/word.hpp"
#include "freetorus/vec.hpp"
#include "oracles.hpp"

using namespace freetorus;

namespace {

Word random_word(std::uint64_t& state, long max_len) {
    auto next = [&state] {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::vector<oracle::OLetter> ls;
    const long n = static_cast<long>(next() % (max_len + 1));
    for (long t = 0; t < n; ++t)
        ls.push_back({static_cast<int>(next() % 2) + 1, (next() % 2) == 0,
                      (next() % 2) == 0 ? 1 : -1});
    return oracle::reduce(std::move(ls)).second;
}

ScaledWord sw(const Scalar& c, const Word& w) { return {c, w}; }

}  // namespace

TEST_CASE("reduce_letters examples") {
    const Letter v1{1, true, 1}, u1{1, false, 1}, u1i{1, false, -1}, v1i{1, true, -1};

    // v1 u1 = d^{-1} u1 v1
    const std::vector<Letter> a = {v1, u1};
    CHECK(reduce_letters(a) == sw(Scalar::d_pow(-1), Word::syllable(1, 1, 1)));

    const std::vector<Letter> b = {u1, u1i};
    CHECK(reduce_letters(b) == sw(Scalar(1), Word::identity()));

    // u1 v1 u1 v1^-1 = d^{-1} u1^2   (letter-rewriting oracle cross-check)
    const std::vector<Letter> c = {u1, v1, u1, v1i};
    const ScaledWord got = reduce_letters(c);
    CHECK(got == sw(Scalar::d_pow(-1), Word::syllable(1, 2, 0)));
    const auto [ophase, oword] = oracle::reduce({{1, false, 1}, {1, true, 1}, {1, false, 1}, {1, true, -1}});
    CHECK(got.coeff == ophase);
    CHECK(got.word == oword);
}

TEST_CASE("multiply examples and properties") {
    const Word u1v1 = Word::syllable(1, 1, 1);
    const Word u1v1i = Word::syllable(1, 1, -1);
    CHECK(multiply(u1v1, u1v1i) == sw(Scalar::d_pow(-1), Word::syllable(1, 2, 0)));

    const Word u2 = Word::syllable(2, 1, 0);
    CHECK(multiply(u1v1, u2) == sw(Scalar(1), Word({Block{1, 1, 1}, Block{2, 1, 0}})));

    // Unitarity on every word of length <= 4.
    for (long l = 0; l <= 4; ++l)
        for (const Word& w : words_of_length(l)) {
            const ScaledWord adj = adjoint(w);
            const ScaledWord prod = multiply(w, adj.word);
            CHECK(prod.word.is_identity());
            CHECK(prod.coeff * adj.coeff == Scalar(1));
        }
}

TEST_CASE("multiplication agrees with the letter oracle") {
    std::uint64_t st = 11;
    for (int t = 0; t < 200; ++t) {
        const Word x = random_word(st, 6);
        const Word y = random_word(st, 6);
        const ScaledWord got = multiply(x, y);
        const auto [phase, word] = oracle::mul_words(x, y);
        CHECK(got.word == word);
        CHECK(got.coeff == phase);
        CHECK(phase.is_d_monomial());  // products of words stay single d-powers
        CHECK(got.word.length() <= x.length() + y.length());
        if (!x.blocks().empty() && !y.blocks().empty() &&
            x.blocks().back().factor != y.blocks().front().factor)
            CHECK(got.word.length() == x.length() + y.length());
    }
}

TEST_CASE("associativity with phases") {
    std::uint64_t st = 23;
    for (int t = 0; t < 120; ++t) {
        const Word x = random_word(st, 6), y = random_word(st, 6), z = random_word(st, 6);
        const ScaledWord xy = multiply(x, y);
        const ScaledWord yz = multiply(y, z);
        const ScaledWord left = multiply(xy.word, z);
        const ScaledWord right = multiply(x, yz.word);
        CHECK(xy.coeff * left.coeff == yz.coeff * right.coeff);
        CHECK(left.word == right.word);
    }
}

TEST_CASE("adjoint examples") {
    CHECK(adjoint(Word::syllable(1, 1, 1)) == sw(Scalar::d_pow(-1), Word::syllable(1, -1, -1)));
    CHECK(adjoint(Word::syllable(1, 1, 0)) == sw(Scalar(1), Word::syllable(1, -1, 0)));
    CHECK(adjoint(Word::identity()) == sw(Scalar(1), Word::identity()));

    std::uint64_t st = 31;
    for (int t = 0; t < 100; ++t) {
        const Word w = random_word(st, 6);
        const ScaledWord a = adjoint(w);
        CHECK(adjoint(a) == sw(Scalar(1), w));  // involutive
        const ScaledWord prod = multiply(w, a.word);
        CHECK(prod.word.is_identity());
        CHECK(a.coeff * prod.coeff == Scalar(1));
    }
}

TEST_CASE("normal form idempotence") {
    std::uint64_t st = 47;
    for (int t = 0; t < 100; ++t) {
        const Word w = random_word(st, 6);
        CHECK(w.is_canonical());
        CHECK(multiply(Word::identity(), w) == sw(Scalar(1), w));
        std::vector<Letter> ls;
        for (const auto& ol : oracle::letters_of(w)) ls.push_back({ol.factor, ol.is_v, ol.exp});
        CHECK(reduce_letters(ls) == sw(Scalar(1), w));
    }
}

TEST_CASE("length and grading") {
    const Word w({Block{1, 1, 2}, Block{2, 1, 0}});  // u1 v1^2 u2
    CHECK(w.length() == 4);
    CHECK(w.grade_class() == WordGrade::One);
    CHECK(Word::identity().length() == 0);
    CHECK(Word::identity().grade_class() == WordGrade::Scalar);
    CHECK(Word({Block{1, 3, -2}}).length() == 5);

    CHECK(Word({Block{1, 1, 0}, Block{2, -1, 0}}).grade_class() == WordGrade::Zero);
    CHECK(Word({Block{1, 0, 1}, Block{2, 1, 1}}).grade_class() == WordGrade::Two);
}

TEST_CASE("exponent counts") {
    // (u1^2 v1^3)(u2^2 v2^3): u-count 4, v-count 6
    const Word w({Block{1, 2, 3}, Block{2, 2, 3}});
    const ExponentCounts c = uv_exponent_counts(w);
    CHECK(c.u_total == 4);
    CHECK(c.v_total == 6);
    CHECK(uv_exponent_counts(Word::identity()).u_total == 0);
    const ExponentCounts c2 = uv_exponent_counts(Word({Block{1, 1, 0}, Block{2, 0, -1}}));
    CHECK(c2.u_total == 1);
    CHECK(c2.v_total == 1);
}

TEST_CASE("word literals round-trip") {
    const ScaledWord a = parse_word_literal("u1^2 v1^-1 u2");
    CHECK(a.coeff == Scalar(1));
    CHECK(a.word == Word({Block{1, 2, -1}, Block{2, 1, 0}}));
    CHECK(a.word.to_string() == "u1^2 v1^-1 u2");

    // Non-canonical input picks up the commutation phase.
    CHECK(parse_word_literal("v1 u1") == sw(Scalar::d_pow(-1), Word::syllable(1, 1, 1)));
    CHECK(parse_word_literal("<identity>") == sw(Scalar(1), Word::identity()));

    std::uint64_t st = 77;
    for (int t = 0; t < 100; ++t) {
        const Word w = random_word(st, 6);
        CHECK(parse_word_literal(w.to_string()) == sw(Scalar(1), w));
    }
    CHECK_THROWS_AS(parse_word_literal("u3"), ParseError);
    CHECK_THROWS_AS(parse_word_literal("u1^0"), ParseError);
    CHECK_THROWS_AS(parse_word_literal("w1"), ParseError);
}

TEST_CASE("ordering and hashing") {
    const Word a = Word::syllable(1, 1, 0);
    const Word b = Word::syllable(1, 2, 0);
    CHECK(a < b);  // length first
    const Word c = Word::syllable(1, -1, 0);
    CHECK(c < a);  // then lexicographic on (factor, u, v)
    CHECK(std::hash<Word>{}(a) == std::hash<Word>{}(Word::syllable(1, 1, 0)));
}
