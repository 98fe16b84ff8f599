#include "freetorus/word.hpp"

#include <cctype>
#include <sstream>

namespace freetorus {

Word Word::syllable(int factor, long u_exp, long v_exp) {
    if (u_exp == 0 && v_exp == 0) return Word();
    return Word({Block{factor, u_exp, v_exp}});
}

bool Word::is_canonical() const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        if (b.factor != 1 && b.factor != 2) return false;
        if (b.u_exp == 0 && b.v_exp == 0) return false;
        if (i > 0 && blocks_[i - 1].factor == b.factor) return false;
    }
    return true;
}

std::string Word::to_string() const {
    if (blocks_.empty()) return "<identity>";
    std::ostringstream out;
    bool first = true;
    auto emit = [&](char gen, int factor, long exp) {
        if (exp == 0) return;
        if (!first) out << ' ';
        first = false;
        out << gen << factor;
        if (exp != 1) out << '^' << exp;
    };
    for (const Block& b : blocks_) {
        emit('u', b.factor, b.u_exp);
        emit('v', b.factor, b.v_exp);
    }
    return out.str();
}

PhasedWord multiply_phased(const Word& x, const Word& y) {
    std::vector<Block> left = x.blocks();
    const std::vector<Block>& right = y.blocks();
    std::size_t j = 0;
    long phase = 0;
    while (!left.empty() && j < right.size() && left.back().factor == right[j].factor) {
        const Block a = left.back();
        const Block b = right[j];
        // u^k v^l . u^{k'} v^{l'} = d^{-l k'} u^{k+k'} v^{l+l'}
        phase -= a.v_exp * b.u_exp;
        left.pop_back();
        ++j;
        const Block merged{a.factor, a.u_exp + b.u_exp, a.v_exp + b.v_exp};
        if (merged.u_exp != 0 || merged.v_exp != 0) {
            left.push_back(merged);
            break;
        }
        // Annihilation exposed a new boundary; re-examine it.
    }
    left.insert(left.end(), right.begin() + static_cast<long>(j), right.end());
    return {phase, Word(std::move(left))};
}

ScaledWord multiply(const Word& x, const Word& y) { return to_scaled(multiply_phased(x, y)); }

PhasedWord adjoint_phased(const Word& x) {
    // (u^k v^l)* = v^{-l} u^{-k} = d^{-kl} u^{-k} v^{-l}, blocks reversed.
    std::vector<Block> rev;
    rev.reserve(x.blocks().size());
    long phase = 0;
    for (auto it = x.blocks().rbegin(); it != x.blocks().rend(); ++it) {
        phase -= it->u_exp * it->v_exp;
        rev.push_back(Block{it->factor, -it->u_exp, -it->v_exp});
    }
    return {phase, Word(std::move(rev))};
}

ScaledWord adjoint(const Word& x) { return to_scaled(adjoint_phased(x)); }

ScaledWord adjoint(const ScaledWord& x) {
    PhasedWord p = adjoint_phased(x.word);
    return {x.coeff.conj() * Scalar::d_pow(p.d_exp), p.word};
}

ScaledWord reduce_letters(std::span<const Letter> letters) {
    PhasedWord acc{0, Word::identity()};
    for (const Letter& l : letters) {
        const Word step = l.is_v ? Word::syllable(l.factor, 0, l.exp)
                                 : Word::syllable(l.factor, l.exp, 0);
        PhasedWord p = multiply_phased(acc.word, step);
        acc.d_exp += p.d_exp;
        acc.word = std::move(p.word);
    }
    return to_scaled(acc);
}

ExponentCounts uv_exponent_counts(const Word& w) {
    ExponentCounts c;
    for (const Block& b : w.blocks()) {
        c.u_total += std::abs(b.u_exp);
        c.v_total += std::abs(b.v_exp);
    }
    return c;
}

ScaledWord parse_word_literal(const std::string& text) {
    PhasedWord acc{0, Word::identity()};
    std::size_t i = 0;
    const auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    while (i < text.size()) {
        const std::size_t tok_start = i;
        if (text.compare(i, 10, "<identity>") == 0) {
            i += 10;
            skip_ws();
            continue;
        }
        const char gen = text[i];
        if (gen != 'u' && gen != 'v')
            throw ParseError("expected a word token u1, u2, v1 or v2", i);
        ++i;
        if (i >= text.size() || (text[i] != '1' && text[i] != '2'))
            throw ParseError("expected factor index 1 or 2", i);
        const int factor = text[i] - '0';
        ++i;
        long exp = 1;
        if (i < text.size() && text[i] == '^') {
            ++i;
            bool neg = false;
            if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
                neg = text[i] == '-';
                ++i;
            }
            if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                throw ParseError("expected an exponent", i);
            long mag = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
                mag = mag * 10 + (text[i++] - '0');
            exp = neg ? -mag : mag;
        }
        if (exp == 0)
            throw ParseError("zero exponent in word token", tok_start);
        const Word step = (gen == 'v') ? Word::syllable(factor, 0, exp)
                                       : Word::syllable(factor, exp, 0);
        PhasedWord p = multiply_phased(acc.word, step);
        acc.d_exp += p.d_exp;
        acc.word = std::move(p.word);
        skip_ws();
    }
    return to_scaled(acc);
}

}  // namespace freetorus
