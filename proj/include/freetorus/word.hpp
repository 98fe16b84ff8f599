#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "freetorus/scalar.hpp"

namespace freetorus {

/// One syllable u_f^{u_exp} v_f^{v_exp} of a completely reduced word.
/// Invariant: (u_exp, v_exp) != (0, 0).
struct Block {
    int factor;   // 1 or 2
    long u_exp;
    long v_exp;

    friend bool operator==(const Block&, const Block&) = default;
    friend auto operator<=>(const Block& a, const Block& b) {
        if (auto c = a.factor <=> b.factor; c != 0) return c;
        if (auto c = a.u_exp <=> b.u_exp; c != 0) return c;
        return a.v_exp <=> b.v_exp;
    }
};

enum class WordGrade { Scalar, Zero, One, Two };

/// Completely reduced word: alternating sequence of torus syllables, each
/// written u-power before v-power.  The empty word is the identity.
/// Words are ordered by (length, then lexicographically on blocks), which
/// fixes every enumeration and serialization order in the project.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}

    static Word identity() { return Word(); }
    /// Single syllable; (u_exp, v_exp) must be nonzero.
    static Word syllable(int factor, long u_exp, long v_exp);

    const std::vector<Block>& blocks() const { return blocks_; }
    bool is_identity() const { return blocks_.empty(); }

    long length() const {
        long n = 0;
        for (const Block& b : blocks_) n += std::abs(b.u_exp) + std::abs(b.v_exp);
        return n;
    }

    /// Number of blocks carrying a nonzero v-exponent; drives the W_l^{0,1,2} grading.
    int v_block_count() const {
        int n = 0;
        for (const Block& b : blocks_) n += (b.v_exp != 0);
        return n;
    }

    WordGrade grade_class() const {
        if (blocks_.empty()) return WordGrade::Scalar;
        const int n = v_block_count();
        return n == 0 ? WordGrade::Zero : (n == 1 ? WordGrade::One : WordGrade::Two);
    }

    bool is_canonical() const;

    friend bool operator==(const Word&, const Word&) = default;
    friend bool operator<(const Word& a, const Word& b) {
        const long la = a.length(), lb = b.length();
        if (la != lb) return la < lb;
        return a.blocks_ < b.blocks_;
    }

    std::string to_string() const;  // "u1^2 v1^-1 u2", identity -> "<identity>"

private:
    std::vector<Block> blocks_;
};

/// Word together with a d-power phase; the coefficient of any product of words
/// is a single power of d, so the exponent alone suffices internally.
struct PhasedWord {
    long d_exp = 0;
    Word word;

    friend bool operator==(const PhasedWord&, const PhasedWord&) = default;
};

/// Word with an arbitrary Scalar coefficient (the public result type).
struct ScaledWord {
    Scalar coeff;
    Word word;

    friend bool operator==(const ScaledWord&, const ScaledWord&) = default;
};

inline ScaledWord to_scaled(const PhasedWord& p) { return {Scalar::d_pow(p.d_exp), p.word}; }

/// Product in the free product algebra: concatenate, merge equal-factor
/// boundary syllables via u^k v^l . u^{k'} v^{l'} = d^{-l k'} u^{k+k'} v^{l+l'},
/// cascading when a merged syllable annihilates.
PhasedWord multiply_phased(const Word& x, const Word& y);
ScaledWord multiply(const Word& x, const Word& y);

/// Adjoint (inverse) of a word as a scaled word: (coeff, word) with
/// coeff * word * x = identity exactly.
PhasedWord adjoint_phased(const Word& x);
ScaledWord adjoint(const Word& x);
ScaledWord adjoint(const ScaledWord& x);

/// One generator letter: u_factor^{exp} or v_factor^{exp} with exp = +-1.
struct Letter {
    int factor;
    bool is_v;
    int exp;  // +1 or -1
};

/// Canonical form of a product of generator letters.
ScaledWord reduce_letters(std::span<const Letter> letters);

struct ExponentCounts {
    long u_total = 0;
    long v_total = 0;
};

/// Total letter counts by generator type (summed over both factors).
ExponentCounts uv_exponent_counts(const Word& w);

/// Parse the CLI word grammar: whitespace-separated tokens u1, v2^-3, ...;
/// "<identity>" denotes the empty word.  The token product is normalized, so
/// the result carries a d-power phase.
ScaledWord parse_word_literal(const std::string& text);

}  // namespace freetorus

template <>
struct std::hash<freetorus::Word> {
    std::size_t operator()(const freetorus::Word& w) const noexcept {
        std::size_t h = 0xcbf29ce484222325ull;
        auto mix = [&h](std::size_t v) {
            h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        };
        for (const auto& b : w.blocks()) {
            mix(static_cast<std::size_t>(b.factor));
            mix(static_cast<std::size_t>(b.u_exp));
            mix(static_cast<std::size_t>(b.v_exp));
        }
        return h;
    }
};
