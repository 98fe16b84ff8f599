#include "freetorus/vec.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freetorus {

bool parallel_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::string graded_class_name(GradedClass g) {
    switch (g) {
        case GradedClass::Zero: return "zero";
        case GradedClass::OneAlpha: return "one-alpha";
        case GradedClass::OneAlpha1: return "one-alpha-1";
        case GradedClass::OneAlpha2: return "one-alpha-2";
        case GradedClass::OneBeta: return "one-beta";
        case GradedClass::One: return "one";
        case GradedClass::Two: return "two";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Vector arithmetic

Vector Vector::operator-() const {
    Vector r;
    for (const auto& [w, c] : sup_) r.sup_.emplace(w, -c);
    return r;
}

Vector operator+(const Vector& x, const Vector& y) {
    Vector r = x;
    r += y;
    return r;
}

Vector operator-(const Vector& x, const Vector& y) {
    Vector r = x;
    r -= y;
    return r;
}

Vector operator*(const Scalar& c, const Vector& x) {
    Vector r;
    if (c.is_zero()) return r;
    for (const auto& [w, cw] : x.support()) r.add_term(w, c * cw);
    return r;
}

Vector& Vector::operator+=(const Vector& y) {
    for (const auto& [w, c] : y.sup_) add_term(w, c);
    return *this;
}

Vector& Vector::operator-=(const Vector& y) {
    for (const auto& [w, c] : y.sup_) add_term(w, -c);
    return *this;
}

Vector vec_combine(const std::vector<Scalar>& scalars, const std::vector<Vector>& vectors) {
    if (scalars.size() != vectors.size())
        throw DomainError("vec_combine: length mismatch");
    Vector r;
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        if (scalars[i].is_zero()) continue;
        for (const auto& [w, c] : vectors[i].support()) r.add_term(w, scalars[i] * c);
    }
    return r;
}

Vector mul_vec(const Vector& x, const Vector& y, Exec exec) {
    const std::size_t pairs = x.term_count() * y.term_count();
    if (exec == Exec::Serial || !parallel_enabled() || pairs < kParallelGrain) {
        Vector r;
        for (const auto& [wx, cx] : x.support())
            for (const auto& [wy, cy] : y.support()) {
                PhasedWord p = multiply_phased(wx, wy);
                r.add_term(p.word, cx * cy * Scalar::d_pow(p.d_exp));
            }
        return r;
    }
    std::vector<const std::pair<const Word, Scalar>*> xs;
    xs.reserve(x.term_count());
    for (const auto& t : x.support()) xs.push_back(&t);
    std::vector<Vector> locals(static_cast<std::size_t>(max_threads()));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (std::size_t i = 0; i < xs.size(); ++i) {
#ifdef _OPENMP
        Vector& local = locals[static_cast<std::size_t>(omp_get_thread_num())];
#else
        Vector& local = locals[0];
#endif
        const auto& [wx, cx] = *xs[i];
        for (const auto& [wy, cy] : y.support()) {
            PhasedWord p = multiply_phased(wx, wy);
            local.add_term(p.word, cx * cy * Scalar::d_pow(p.d_exp));
        }
    }
    Vector r;
    for (Vector& l : locals) r += l;  // exact addition: merge order is immaterial
    return r;
}

Scalar trace(const Vector& x) { return x.coeff(Word::identity()); }

Scalar inner(const Vector& x, const Vector& y) {
    Scalar acc;
    auto ix = x.support().begin();
    auto iy = y.support().begin();
    while (ix != x.support().end() && iy != y.support().end()) {
        if (ix->first < iy->first) {
            ++ix;
        } else if (iy->first < ix->first) {
            ++iy;
        } else {
            acc += iy->second.conj() * ix->second;
            ++ix;
            ++iy;
        }
    }
    return acc;
}

Scalar norm_sq(const Vector& x) { return inner(x, x); }

Vector adjoint_vec(const Vector& x) {
    Vector r;
    for (const auto& [w, c] : x.support()) {
        PhasedWord p = adjoint_phased(w);
        r.add_term(p.word, c.conj() * Scalar::d_pow(p.d_exp));
    }
    return r;
}

Vector project_length(const Vector& x, long l) {
    Vector r;
    for (const auto& [w, c] : x.support())
        if (w.length() == l) r.add_term(w, c);
    return r;
}

bool is_v_power(const Word& w) {
    return w.blocks().size() == 1 && w.blocks()[0].u_exp == 0;
}

Vector bare_v_led_part(const Vector& x) {
    Vector r;
    for (const auto& [w, c] : x.support())
        if (!w.is_identity() && w.blocks().front().u_exp == 0) r.add_term(w, c);
    return r;
}

Vector bare_v_trailing_part(const Vector& x) {
    Vector r;
    for (const auto& [w, c] : x.support())
        if (!w.is_identity() && w.blocks().back().u_exp == 0) r.add_term(w, c);
    return r;
}

bool is_u_boundary_vector(const Vector& x) {
    for (const auto& [w, c] : x.support()) {
        if (w.is_identity()) continue;
        if (w.blocks().front().u_exp == 0 || w.blocks().back().u_exp == 0) return false;
    }
    return true;
}

bool is_alpha_word(const Word& w, long l) {
    if (l < 2) return false;
    const auto& b = w.blocks();
    if (b.size() == 1) {
        return std::abs(b[0].u_exp) == 1 && std::abs(b[0].v_exp) == l - 1;
    }
    if (b.size() == 2) {
        const bool u_then_v = std::abs(b[0].u_exp) == 1 && b[0].v_exp == 0 &&
                              b[1].u_exp == 0 && std::abs(b[1].v_exp) == l - 1;
        const bool v_then_u = b[0].u_exp == 0 && std::abs(b[0].v_exp) == l - 1 &&
                              std::abs(b[1].u_exp) == 1 && b[1].v_exp == 0;
        return u_then_v || v_then_u;
    }
    return false;
}

Vector project_class_coarse(const Vector& x, long l, GradedClass g) {
    if (g == GradedClass::OneAlpha1 || g == GradedClass::OneAlpha2)
        throw DomainError("project_class: refined class needs basis data (use BasisCatalog)");
    Vector r;
    for (const auto& [w, c] : x.support()) {
        if (w.length() != l) continue;
        const WordGrade cls = w.grade_class();
        bool keep = false;
        switch (g) {
            case GradedClass::Zero: keep = cls == WordGrade::Zero; break;
            case GradedClass::One: keep = cls == WordGrade::One; break;
            case GradedClass::Two: keep = cls == WordGrade::Two; break;
            case GradedClass::OneAlpha: keep = cls == WordGrade::One && is_alpha_word(w, l); break;
            case GradedClass::OneBeta:
                keep = cls == WordGrade::One && !is_alpha_word(w, l) && !is_v_power(w);
                break;
            default: break;
        }
        if (keep) r.add_term(w, c);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Word enumeration

namespace {

void gen_words(long remaining, int prev_factor, std::vector<Block>& cur, std::vector<Word>& out) {
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    for (int f = 1; f <= 2; ++f) {
        if (f == prev_factor) continue;
        for (long b = 1; b <= remaining; ++b) {
            for (long u = -b; u <= b; ++u) {
                const long rest = b - std::abs(u);
                for (int sv = 0; sv < 2; ++sv) {
                    if (sv == 1 && rest == 0) break;  // +-0 is one value
                    const long v = sv == 0 ? rest : -rest;
                    if (u == 0 && v == 0) continue;
                    cur.push_back(Block{f, u, v});
                    gen_words(remaining - b, f, cur, out);
                    cur.pop_back();
                }
            }
        }
    }
}

std::mutex g_enum_mutex;
std::map<long, std::vector<Word>> g_words_cache;
std::map<std::pair<long, WordGrade>, std::vector<Word>> g_basis_cache;

}  // namespace

const std::vector<Word>& words_of_length(long l) {
    if (l < 0) throw DomainError("words_of_length: negative length");
    std::lock_guard<std::mutex> lock(g_enum_mutex);
    auto it = g_words_cache.find(l);
    if (it != g_words_cache.end()) return it->second;
    std::vector<Word> out;
    if (l == 0) {
        out.push_back(Word::identity());
    } else {
        std::vector<Block> cur;
        gen_words(l, 0, cur, out);
        std::sort(out.begin(), out.end());
    }
    return g_words_cache.emplace(l, std::move(out)).first->second;
}

const std::vector<Word>& basis_of_W(long l, WordGrade cls) {
    std::lock_guard<std::mutex> lock(g_enum_mutex);
    const auto key = std::make_pair(l, cls);
    auto it = g_basis_cache.find(key);
    if (it != g_basis_cache.end()) return it->second;
    std::vector<Word> out;
    {
        // words_of_length takes the same mutex; compute inline.
        auto wit = g_words_cache.find(l);
        if (wit == g_words_cache.end()) {
            std::vector<Word> all;
            if (l == 0) {
                all.push_back(Word::identity());
            } else {
                std::vector<Block> cur;
                gen_words(l, 0, cur, all);
                std::sort(all.begin(), all.end());
            }
            wit = g_words_cache.emplace(l, std::move(all)).first;
        }
        for (const Word& w : wit->second)
            if (w.grade_class() == cls) out.push_back(w);
    }
    return g_basis_cache.emplace(key, std::move(out)).first->second;
}

// ---------------------------------------------------------------------------
// Numeric companion

NumericVector NumericVector::from_exact(const Vector& x, double theta) {
    NumericVector r;
    for (const auto& [w, c] : x.support()) r.sup_.emplace(w, c.eval_numeric(theta));
    return r;
}

NumericVector& NumericVector::operator+=(const NumericVector& y) {
    for (const auto& [w, c] : y.sup_) add_term(w, c);
    return *this;
}

NumericVector operator*(std::complex<double> c, const NumericVector& x) {
    NumericVector r;
    for (const auto& [w, cw] : x.sup_) r.sup_.emplace(w, c * cw);
    return r;
}

double NumericVector::norm() const {
    double s = 0.0;
    for (const auto& [w, c] : sup_) s += std::norm(c);
    return std::sqrt(s);
}

NumericVector mul_numeric(const NumericVector& x, const NumericVector& y, double theta) {
    const std::complex<double> z = unit_circle_point(theta);
    NumericVector r;
    for (const auto& [wx, cx] : x.sup_)
        for (const auto& [wy, cy] : y.sup_) {
            PhasedWord p = multiply_phased(wx, wy);
            r.add_term(p.word, cx * cy * std::pow(z, static_cast<double>(p.d_exp)));
        }
    return r;
}

std::complex<double> inner_numeric(const NumericVector& x, const NumericVector& y) {
    std::complex<double> acc{0.0, 0.0};
    auto ix = x.sup_.begin();
    auto iy = y.sup_.begin();
    while (ix != x.sup_.end() && iy != y.sup_.end()) {
        if (ix->first < iy->first) ++ix;
        else if (iy->first < ix->first) ++iy;
        else { acc += std::conj(iy->second) * ix->second; ++ix; ++iy; }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Vector literal I/O

namespace {

bool coeff_needs_parens(const std::string& s) {
    int depth = 0;
    char prev = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (depth == 0 && (c == '/' || ((c == '+' || c == '-') && prev != '^' && i > 0)))
            return true;
        if (!std::isspace(static_cast<unsigned char>(c))) prev = c;
    }
    return false;
}

/// Split a vector literal into signed top-level terms.
std::vector<std::pair<bool, std::string>> split_terms(const std::string& s) {
    std::vector<std::pair<bool, std::string>> terms;
    int depth = 0;
    char prev = 0;
    bool cur_neg = false;
    std::size_t start = 0;
    bool leading = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') ++depth;
        else if (c == ')') --depth;
        else if (depth == 0 && (c == '+' || c == '-') && prev != '^') {
            if (leading && c == '-') {
                cur_neg = true;
                start = i + 1;
            } else if (!leading) {
                terms.emplace_back(cur_neg, s.substr(start, i - start));
                cur_neg = (c == '-');
                start = i + 1;
            }
        }
        if (!std::isspace(static_cast<unsigned char>(c))) {
            prev = c;
            if (c != '+' && c != '-') leading = false;
        }
    }
    terms.emplace_back(cur_neg, s.substr(start));
    return terms;
}

Vector parse_term(const std::string& term, bool negate) {
    // Try each top-level '*' from the right as the coeff/word separator.
    std::vector<std::size_t> stars;
    int depth = 0;
    for (std::size_t i = 0; i < term.size(); ++i) {
        if (term[i] == '(') ++depth;
        else if (term[i] == ')') --depth;
        else if (term[i] == '*' && depth == 0) stars.push_back(i);
    }
    for (auto it = stars.rbegin(); it != stars.rend(); ++it) {
        const std::string head = term.substr(0, *it);
        const std::string tail = term.substr(*it + 1);
        try {
            ScaledWord sw = parse_word_literal(tail);
            Scalar c = Scalar::parse(head);
            if (negate) c = -c;
            return Vector(c * sw.coeff, sw.word);
        } catch (const ParseError&) {
            // not the separator; keep trying
        }
    }
    ScaledWord sw = parse_word_literal(term);  // bare word, coefficient 1
    Scalar c = negate ? -sw.coeff : sw.coeff;
    return Vector(c, sw.word);
}

}  // namespace

std::string Vector::to_string() const {
    if (sup_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [w, c] : sup_) {
        std::string cs = c.to_string();
        bool neg = false;
        if (!cs.empty() && cs[0] == '-' && !coeff_needs_parens(cs.substr(1))) {
            neg = true;
            cs = cs.substr(1);
        }
        if (coeff_needs_parens(cs)) cs = "(" + cs + ")";
        if (first) {
            out << (neg ? "-" : "") << cs;
            first = false;
        } else {
            out << (neg ? " - " : " + ") << cs;
        }
        out << " * " << w.to_string();
    }
    return out.str();
}

Vector parse_vector_literal(const std::string& text) {
    Vector r;
    for (const auto& [neg, term] : split_terms(text)) {
        if (term.find_first_not_of(" \t\r\n") == std::string::npos)
            throw ParseError("empty term in vector literal", 0);
        r += parse_term(term, neg);
    }
    return r;
}

}  // namespace freetorus
