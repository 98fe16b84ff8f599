// Test-only oracles, deliberately independent of the production normal-form
// code: a naive fixpoint letter rewriter for word products, and letter
// expansions for cross-checking.

#pragma once

#include <utility>
#include <vector>

#include "freetorus/vec.hpp"

namespace freetorus::oracle {

struct OLetter {
    int factor;  // 1 or 2
    bool is_v;
    int exp;  // +1 or -1
};

/// Rewrites a letter string to canonical form by repeatedly (a) cancelling
/// adjacent inverse letters and (b) swapping v_i^t u_i^s -> d^{-st} u_i^s v_i^t,
/// until no rule applies.  Returns the exact phase and the canonical word.
inline std::pair<Scalar, Word> reduce(std::vector<OLetter> ls) {
    Scalar phase(1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t j = 0; j + 1 < ls.size(); ++j) {
            const OLetter& a = ls[j];
            const OLetter& b = ls[j + 1];
            if (a.factor == b.factor && a.is_v == b.is_v && a.exp == -b.exp) {
                ls.erase(ls.begin() + static_cast<long>(j), ls.begin() + static_cast<long>(j) + 2);
                changed = true;
                break;
            }
            if (a.factor == b.factor && a.is_v && !b.is_v) {
                phase *= Scalar::d_pow(-static_cast<long>(a.exp) * b.exp);
                std::swap(ls[j], ls[j + 1]);
                changed = true;
                break;
            }
        }
    }
    // Group the fixpoint into syllables.
    std::vector<Block> blocks;
    for (const OLetter& l : ls) {
        if (!blocks.empty() && blocks.back().factor == l.factor &&
            !(blocks.back().v_exp != 0 && !l.is_v)) {
            if (l.is_v)
                blocks.back().v_exp += l.exp;
            else
                blocks.back().u_exp += l.exp;
        } else {
            blocks.push_back(Block{l.factor, l.is_v ? 0 : l.exp, l.is_v ? l.exp : 0});
        }
    }
    return {phase, Word(std::move(blocks))};
}

inline std::vector<OLetter> letters_of(const Word& w) {
    std::vector<OLetter> out;
    for (const Block& b : w.blocks()) {
        for (long t = 0; t < std::labs(b.u_exp); ++t)
            out.push_back({b.factor, false, b.u_exp > 0 ? 1 : -1});
        for (long t = 0; t < std::labs(b.v_exp); ++t)
            out.push_back({b.factor, true, b.v_exp > 0 ? 1 : -1});
    }
    return out;
}

/// Product of two words by brute-force letter rewriting.
inline std::pair<Scalar, Word> mul_words(const Word& x, const Word& y) {
    std::vector<OLetter> ls = letters_of(x);
    const std::vector<OLetter> ry = letters_of(y);
    ls.insert(ls.end(), ry.begin(), ry.end());
    return reduce(std::move(ls));
}

/// Bilinear product of vectors through the letter oracle.
inline Vector mul_vectors(const Vector& x, const Vector& y) {
    Vector out;
    for (const auto& [wx, cx] : x.support())
        for (const auto& [wy, cy] : y.support()) {
            auto [phase, w] = mul_words(wx, wy);
            out.add_term(w, cx * cy * phase);
        }
    return out;
}

/// tau(y* x) through the letter oracle (adjoint by reversing inverted letters).
inline Scalar trace_form(const Vector& x, const Vector& y) {
    Scalar acc;
    for (const auto& [wy, cy] : y.support()) {
        std::vector<OLetter> adj = letters_of(wy);
        std::reverse(adj.begin(), adj.end());
        for (OLetter& l : adj) l.exp = -l.exp;
        for (const auto& [wx, cx] : x.support()) {
            std::vector<OLetter> ls = adj;
            const std::vector<OLetter> rx = letters_of(wx);
            ls.insert(ls.end(), rx.begin(), rx.end());
            auto [phase, w] = reduce(std::move(ls));
            if (w.is_identity()) acc += cy.conj() * cx * phase;
        }
    }
    return acc;
}

}  // namespace freetorus::oracle
