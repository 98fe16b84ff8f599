#include "freetorus/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

namespace freetorus {

std::string FamilyIndex::to_string() const {
    std::ostringstream out;
    if (kind == Kind::XiN) {
        out << "m:" << m;
    } else {
        out << "ilk:" << i << "," << l << "," << k;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Pairing kernels

Matrix pairing_matrix(const std::vector<Vector>& rows, const std::vector<Vector>& cols, Exec exec) {
    Matrix g(rows.size(), cols.size());
    const std::size_t total = rows.size() * cols.size();
#ifdef _OPENMP
    const bool par = exec == Exec::Parallel && parallel_enabled() && total >= kParallelGrain;
#pragma omp parallel for schedule(dynamic, 8) if (par)
#endif
    for (std::size_t t = 0; t < total; ++t) {
        const std::size_t i = t / cols.size(), j = t % cols.size();
        g.at(i, j) = inner(rows[i], cols[j]);
    }
    return g;
}

Matrix gram_matrix(const std::vector<Vector>& family, Exec exec) {
    // <f_j, f_i> = conj(<f_i, f_j>): fill the upper triangle and mirror.
    const std::size_t n = family.size();
    Matrix g(n, n);
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    idx.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) idx.emplace_back(i, j);
#ifdef _OPENMP
    const bool par = exec == Exec::Parallel && parallel_enabled() && idx.size() >= kParallelGrain;
#pragma omp parallel for schedule(dynamic, 8) if (par)
#endif
    for (std::size_t t = 0; t < idx.size(); ++t) {
        const auto [i, j] = idx[t];
        g.at(i, j) = inner(family[i], family[j]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g.at(i, j) = g.at(j, i).conj();
    return g;
}

Vector project_onto_span(const Vector& x, const std::vector<Vector>& family,
                         std::vector<Scalar>* coeffs_out) {
    if (family.empty()) {
        if (coeffs_out) coeffs_out->clear();
        return Vector();
    }
    // <x, f_a> = sum_b c_b <f_b, f_a>
    const std::size_t n = family.size();
    Matrix g(n, n);
    const Matrix gm = gram_matrix(family);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) g.at(a, b) = gm.at(b, a);
    std::vector<Scalar> rhs(n);
    for (std::size_t a = 0; a < n; ++a) rhs[a] = inner(x, family[a]);
    SolveOutcome out = solve(g, rhs);
    if (!out.solution)
        throw DomainError("project_onto_span: singular Gram system (unexpected)");
    if (coeffs_out) *coeffs_out = *out.solution;
    return vec_combine(*out.solution, family);
}

// ---------------------------------------------------------------------------
// chi and the S_l generators

void BasisCatalog::check_truncation(long t) const {
    if (t > cap_)
        throw DomainError("truncation " + std::to_string(t) + " exceeds the hard cap " +
                          std::to_string(cap_) + " (raise it only with --unsafe-truncation)");
}

const Vector& BasisCatalog::chi_unlocked(long l) {
    if (l < 0) throw DomainError("chi: negative index");
    auto it = chi_.find(l);
    if (it != chi_.end()) return it->second;
    Vector v;
    if (l == 0) {
        v = Vector::identity();
    } else {
        for (const Word& w : basis_of_W(l, WordGrade::Zero)) v.add_term(w, Scalar(1));
    }
    return chi_.emplace(l, std::move(v)).first->second;
}

const Vector& BasisCatalog::chi(long l) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    return chi_unlocked(l);
}

Vector BasisCatalog::chi1_tilde() {
    return Scalar::sqrt3_pow(-1) * chi(1);
}

std::vector<Vector> BasisCatalog::s_l_gens_for(long l, int cls_filter) {
    if (l < 1) throw DomainError("s_l_generators: l must be >= 1");
    const Vector& chi1 = chi_unlocked(1);
    std::vector<const Word*> ws;
    if (l == 1) {
        static const Word id = Word::identity();
        if (cls_filter == -1 || cls_filter == 0) ws.push_back(&id);
    } else {
        for (const Word& w : words_of_length(l - 1)) {
            if (cls_filter >= 0 && w.v_block_count() != cls_filter) continue;
            ws.push_back(&w);
        }
    }
    std::vector<Vector> gens;
    gens.reserve(2 * ws.size());
    for (const Word* w : ws) {
        Vector wv(*w);
        Vector left = project_length(mul_vec(chi1, wv), l);
        Vector right = project_length(mul_vec(wv, chi1), l);
        gens.push_back(std::move(left));
        if (right != gens.back()) gens.push_back(std::move(right));
    }
    return gens;
}

std::vector<Vector> BasisCatalog::s_l_generators(long l) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    return s_l_gens_for(l, -1);
}

std::vector<Vector> BasisCatalog::s_l_generators_class(long l, WordGrade cls) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    int filter = 0;
    switch (cls) {
        case WordGrade::Zero: filter = 0; break;
        case WordGrade::One: filter = 1; break;
        case WordGrade::Two: filter = 2; break;
        default: throw DomainError("s_l_generators_class: bad class");
    }
    return s_l_gens_for(l, filter);
}

// ---------------------------------------------------------------------------
// Orthogonal complements

namespace {

/// Exact Gram-Schmidt (orthogonal, unnormalized).  Nonzero inputs that are
/// linearly independent stay nonzero: <v,v> = 0 forces v = 0 in K because the
/// evaluation d = e^{2 pi i theta} turns it into a sum of |.|^2 on a circle.
std::vector<Vector> gram_schmidt(std::vector<Vector> vs) {
    std::vector<Scalar> nsq;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const Scalar c = inner(vs[i], vs[j]);
            if (!c.is_zero()) vs[i] -= (c / nsq[j]) * vs[j];
        }
        nsq.push_back(norm_sq(vs[i]));
        if (nsq.back().is_zero())
            throw DomainError("gram_schmidt: dependent family");
    }
    return vs;
}

BasisFamily make_family(std::string label, long l, std::vector<Vector> members) {
    BasisFamily f;
    f.label = std::move(label);
    f.l = l;
    f.members = std::move(members);
    f.gram = gram_matrix(f.members);
    return f;
}

/// Kernel of the conjugate pairing of `gens` against the span of `words`,
/// returned as vectors in that span (exact, deterministic order).
std::vector<Vector> orthogonal_complement_in(const std::vector<Word>& words,
                                             const std::vector<Vector>& gens) {
    if (words.empty()) return {};
    Matrix pairing(gens.size(), words.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
        // <xi, gen> = sum_w conj(gen_w) xi_w = 0
        std::size_t j = 0;
        for (const Word& w : words) {
            pairing.at(i, j) = gens[i].coeff(w).conj();
            ++j;
        }
    }
    std::vector<Vector> out;
    for (const auto& coeffs : kernel_basis(pairing)) {
        Vector v;
        for (std::size_t j = 0; j < words.size(); ++j) v.add_term(words[j], coeffs[j]);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

const BasisFamily& BasisCatalog::complement_unlocked(long l, WordGrade cls) {
    const auto key = std::make_pair(l, cls);
    auto it = complements_.find(key);
    if (it != complements_.end()) return it->second;
    if (l < 1) throw DomainError("complement_basis: l must be >= 1");
    std::vector<Vector> comp;
    if (l == 1 && cls == WordGrade::Zero) {
        // The epsilon-aligned basis of W_1^0 minus S_1^0.  Any orthogonal basis
        // would do for the complement itself, but the l = 1 analysis (the
        // epsilon cases of the recursion and inner-product lemmas) only holds
        // on vectors of the form c1 (u1 + e u1^{-1}) + c2 (u2 + e u2^{-1}), so
        // the catalog picks the basis split along that grading.
        auto u = [](int f, long e) { return Vector(Word::syllable(f, e, 0)); };
        comp = {u(1, 1) - u(1, -1), u(2, 1) - u(2, -1), u(1, 1) + u(1, -1) - u(2, 1) - u(2, -1)};
    } else {
        const std::vector<Word>& words = basis_of_W(l, cls);
        int filter = cls == WordGrade::Zero ? 0 : (cls == WordGrade::One ? 1 : 2);
        const std::vector<Vector> gens = s_l_gens_for(l, filter);
        comp = gram_schmidt(orthogonal_complement_in(words, gens));
    }
    std::string cname = cls == WordGrade::Zero ? "zero" : (cls == WordGrade::One ? "one" : "two");
    BasisFamily fam = make_family("W" + std::to_string(l) + "-" + cname + "-complement", l,
                                  std::move(comp));
    return complements_.emplace(key, std::move(fam)).first->second;
}

const BasisFamily& BasisCatalog::complement_basis(long l, WordGrade cls) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    return complement_unlocked(l, cls);
}

// ---------------------------------------------------------------------------
// xi_{r,s} and the gamma family

Vector BasisCatalog::xi_rs(const Vector& xi, long r, long s) {
    if (r < 0 || s < 0) return Vector();
    if (xi.is_zero()) return Vector();
    long l = -1;
    for (const auto& [w, c] : xi.support()) {
        if (l == -1) l = w.length();
        else if (w.length() != l)
            throw DomainError("xi_rs: input must be supported in a single length");
    }
    std::lock_guard<std::recursive_mutex> lock(mu_);
    const Vector& cr = chi_unlocked(r);
    const Vector& cs = chi_unlocked(s);
    return project_length(mul_vec(mul_vec(cr, xi), cs), l + r + s);
}

Vector BasisCatalog::gamma(int i, long l, GammaKind which) {
    if (i != 1 && i != 2) throw DomainError("gamma: factor index must be 1 or 2");
    if (l == 0) throw DomainError("gamma: l must be nonzero");
    const bool needs_big_l = which == GammaKind::Plain || which == GammaKind::Bar;
    if (needs_big_l && (l == 1 || l == -1))
        throw DomainError("gamma: plain/bar need |l| >= 2");
    const long m = l - (l > 0 ? 1 : -1);  // l - sgn(l)
    const Vector vpow(Word::syllable(i, 0, m));  // identity when m = 0
    const int o = 3 - i;
    const Vector u_plus(Word::syllable(i, 1, 0));
    const Vector u_minus(Word::syllable(i, -1, 0));
    Vector uhat(Word::syllable(o, 1, 0));
    uhat += Vector(Word::syllable(o, -1, 0));
    switch (which) {
        case GammaKind::OnePlus: return mul_vec(vpow, u_plus);
        case GammaKind::OneMinus: return mul_vec(vpow, u_minus);
        case GammaKind::Two: return mul_vec(vpow, uhat);
        case GammaKind::Three: return mul_vec(uhat, vpow);
        case GammaKind::Plain: {
            const Scalar c = Scalar(2) / (Scalar::d_pow(-m) - Scalar::d_pow(m));
            return c * (mul_vec(vpow, u_plus) - mul_vec(vpow, u_minus)) - mul_vec(uhat, vpow);
        }
        case GammaKind::Bar: {
            const Scalar c = Scalar(2) / (Scalar::d_pow(m) - Scalar::d_pow(-m));
            return c * (Scalar::d_pow(m) * mul_vec(vpow, u_plus) -
                        Scalar::d_pow(-m) * mul_vec(vpow, u_minus)) -
                   mul_vec(vpow, uhat);
        }
    }
    throw DomainError("gamma: bad kind");
}

const W1Decomposition& BasisCatalog::w1_unlocked(long l) {
    auto it = w1_.find(l);
    if (it != w1_.end()) return it->second;
    if (l < 1) throw DomainError("w1_decomposition: l must be >= 1");
    W1Decomposition d;
    for (int i = 1; i <= 2; ++i)
        for (const long e : {l, -l}) d.vpowers.emplace_back(Word::syllable(i, 0, e));

    std::vector<Vector> a1;
    std::vector<Vector> a2;
    if (l >= 2) {
        for (const GammaKind kind : {GammaKind::Plain, GammaKind::Bar})
            for (int i = 1; i <= 2; ++i)
                for (const long e : {l, -l}) a1.push_back(gamma(i, e, kind));
        for (int i = 1; i <= 2; ++i) {
            const int o = 3 - i;
            Vector udiff(Word::syllable(o, 1, 0));
            udiff -= Vector(Word::syllable(o, -1, 0));
            for (const long e : {l - 1, -(l - 1)}) {
                const Vector vpow(Word::syllable(i, 0, e));
                a2.push_back(mul_vec(udiff, vpow));
                a2.push_back(mul_vec(vpow, udiff));
            }
        }
    }
    d.alpha1 = make_family("W" + std::to_string(l) + "-one-alpha-1", l, std::move(a1));
    d.alpha2 = make_family("W" + std::to_string(l) + "-one-alpha-2", l, std::move(a2));
    // Linear independence of the constructed alpha families (BasisFamily invariant).
    for (const BasisFamily* f : {&d.alpha1, &d.alpha2}) {
        if (!f->members.empty() && rank(f->gram) != f->members.size())
            throw DomainError(f->label + ": dependent family");
    }

    // beta: the word-span of W_l^{1,beta} cut down to the kernel of the S_l^1 pairing.
    std::vector<Word> beta_words;
    for (const Word& w : basis_of_W(l, WordGrade::One))
        if (!is_alpha_word(w, l) && !is_v_power(w)) beta_words.push_back(w);
    const std::vector<Vector> gens = s_l_gens_for(l, 1);
    d.beta = make_family("W" + std::to_string(l) + "-one-beta-complement", l,
                         gram_schmidt(orthogonal_complement_in(beta_words, gens)));
    return w1_.emplace(l, std::move(d)).first->second;
}

const W1Decomposition& BasisCatalog::w1_decomposition(long l) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    return w1_unlocked(l);
}

// ---------------------------------------------------------------------------
// xi^{i,l,k}_{r,s}

Vector BasisCatalog::xi_ilk(int i, long l, long k, long r, long s) {
    if (l == 0) throw DomainError("xi_ilk: l must be nonzero");
    if (i != 1 && i != 2) throw DomainError("xi_ilk: factor index must be 1 or 2");
    if (r < 0 || s < 0) return Vector();
    const int o = 3 - i;
    std::vector<Word> left, right;
    if (r == 0) {
        left.push_back(Word::identity());
    } else {
        for (const Word& w : basis_of_W(r, WordGrade::Zero))
            if (w.blocks().back().factor == o) left.push_back(w);
    }
    if (s == 0) {
        right.push_back(Word::identity());
    } else {
        for (const Word& w : basis_of_W(s, WordGrade::Zero))
            if (w.blocks().front().factor == o) right.push_back(w);
    }
    const Word middle = Word::syllable(i, k, l);
    const Scalar coeff = Scalar::sqrt3_pow(2 - r - s) * Scalar::d_pow(-l * k);
    Vector out;
    for (const Word& w : left) {
        const PhasedWord wm = multiply_phased(w, middle);
        for (const Word& w2 : right) {
            const PhasedWord full = multiply_phased(wm.word, w2);
            out.add_term(full.word, coeff * Scalar::d_pow(wm.d_exp + full.d_exp));
        }
    }
    return out;
}

Scalar BasisCatalog::xi_ilk_norm_sq(long r, long s) {
    if (r >= 1 && s >= 1) return Scalar(4);
    if (r == 0 && s == 0) return Scalar(9);
    return Scalar(6);
}

// ---------------------------------------------------------------------------
// The xi_n enumeration, the truncated L, and Riesz expansion

const std::vector<XiNEntry>& BasisCatalog::xi_n_family(long truncation) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    check_truncation(truncation);
    for (long l = xi_n_built_to_ + 1; l <= truncation; ++l) {
        auto push = [&](const std::vector<Vector>& vs, GradedClass cls) {
            for (const Vector& v : vs) {
                XiNEntry e;
                e.m = static_cast<long>(xi_n_.size());
                e.l = l;
                e.cls = cls;
                e.vec = v;
                e.norm_sq = norm_sq(v);
                xi_n_.push_back(std::move(e));
            }
        };
        push(complement_unlocked(l, WordGrade::Zero).members, GradedClass::Zero);
        push(complement_unlocked(l, WordGrade::Two).members, GradedClass::Two);
        const W1Decomposition& d = w1_unlocked(l);
        push(d.alpha2.members, GradedClass::OneAlpha2);
        push(d.beta.members, GradedClass::OneBeta);
        xi_n_built_to_ = l;
    }
    return xi_n_;
}

BasisFamily BasisCatalog::subspace_L_basis(long truncation) {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    check_truncation(truncation);
    if (truncation < 1) throw DomainError("subspace_L_basis: truncation must be >= 1");
    std::vector<Vector> members;
    for (long l0 = 1; l0 <= truncation; ++l0) {
        std::vector<Vector> seeds;
        for (int i = 1; i <= 2; ++i)
            for (const long e : {l0, -l0}) seeds.emplace_back(Word::syllable(i, 0, e));
        if (l0 >= 2) {
            const W1Decomposition& d = w1_unlocked(l0);
            for (const Vector& g : d.alpha1.members) seeds.push_back(g);
        }
        for (const Vector& seed : seeds)
            for (long r = 0; l0 + r <= truncation; ++r)
                for (long s = 0; l0 + r + s <= truncation; ++s)
                    members.push_back(xi_rs(seed, r, s));
    }
    BasisFamily f;
    f.label = "L-truncated-" + std::to_string(truncation);
    f.l = -1;
    f.members = std::move(members);
    f.gram = gram_matrix(f.members);
    return f;  // spanning family; members need not be independent
}

CoeffTable BasisCatalog::expand_over_ilk(const Vector& x, Vector* residual_out) {
    // A word with exactly one v-carrying syllable w . u_i^k v_i^l . w' belongs
    // to exactly one xi^{i,l,k}_{r,s} (r, s the outer lengths), so the
    // candidate indices can be read off the support; the family is orthogonal,
    // so coefficients are plain projections.
    std::set<std::array<long, 5>> idx;
    for (const auto& [w, c] : x.support()) {
        if (w.v_block_count() != 1) continue;
        const auto& bs = w.blocks();
        long r = 0;
        std::size_t bi = 0;
        while (bs[bi].v_exp == 0) r += std::abs(bs[bi++].u_exp);
        long s = 0;
        for (std::size_t j = bi + 1; j < bs.size(); ++j) s += std::abs(bs[j].u_exp);
        idx.insert({bs[bi].factor, bs[bi].v_exp, bs[bi].u_exp, r, s});
    }
    CoeffTable table;
    Vector combo;
    for (const auto& [i, l, k, r, s] : idx) {
        const Vector f = xi_ilk(static_cast<int>(i), l, k, r, s);
        const Scalar c = inner(x, f) / xi_ilk_norm_sq(r, s);
        if (c.is_zero()) continue;
        table[CoeffKey{FamilyIndex{FamilyIndex::Kind::Ilk, 0, static_cast<int>(i), l, k}, r, s}] = c;
        combo += c * f;
    }
    if (residual_out) *residual_out = x - combo;
    return table;
}

CoeffTable BasisCatalog::riesz_expand(const Vector& x, long truncation, double theta) {
    check_truncation(truncation);
    for (const auto& [w, c] : x.support())
        if (w.length() > truncation)
            throw DomainError("riesz_expand: support exceeds the truncation");
    {
        std::lock_guard<std::recursive_mutex> lock(mu_);
        for (long j = 0; j <= truncation; ++j)
            if (!inner(x, chi_unlocked(j)).is_zero())
                throw DomainError("riesz_expand: input has a chi-span (A) component");
    }

    std::vector<CoeffKey> keys;
    std::vector<Vector> family;
    for (const XiNEntry& e : xi_n_family(truncation)) {
        for (long r = 0; e.l + r <= truncation; ++r)
            for (long s = 0; e.l + r + s <= truncation; ++s) {
                keys.push_back(CoeffKey{FamilyIndex{FamilyIndex::Kind::XiN, e.m, 0, 0, 0}, r, s});
                family.push_back(xi_rs(e.vec, r, s));
            }
    }
    for (int i = 1; i <= 2; ++i)
        for (long al = 1; al <= truncation; ++al)
            for (const long l : {al, -al})
                for (long r = 0; r + al <= truncation; ++r)
                    for (long s = 0; r + al + s <= truncation; ++s) {
                        const long kbound = truncation - al - r - s;
                        for (long k = -kbound; k <= kbound; ++k) {
                            keys.push_back(
                                CoeffKey{FamilyIndex{FamilyIndex::Kind::Ilk, 0, i, l, k}, r, s});
                            family.push_back(xi_ilk(i, l, k, r, s));
                        }
                    }

    std::vector<Scalar> coeffs;
    const Vector proj = project_onto_span(x, family, &coeffs);
    const Vector residual = x - proj;
    if (!residual.is_zero()) {
        double nrm = 0.0;
        for (const auto& [w, c] : residual.support()) nrm += std::norm(c.eval_numeric(theta));
        throw DomainError("riesz_expand: residual outside the truncated span, |res| = " +
                          std::to_string(std::sqrt(nrm)));
    }
    CoeffTable table;
    for (std::size_t a = 0; a < keys.size(); ++a)
        if (!coeffs[a].is_zero()) table[keys[a]] = coeffs[a];
    return table;
}

Vector BasisCatalog::project_class(const Vector& x, long l, GradedClass g) {
    if (g == GradedClass::OneAlpha1 || g == GradedClass::OneAlpha2) {
        if (l < 1) throw DomainError("project_class: refined classes are undefined for l = 0");
        const W1Decomposition& d = w1_decomposition(l);
        const auto& fam = (g == GradedClass::OneAlpha1) ? d.alpha1.members : d.alpha2.members;
        return project_onto_span(project_length(x, l), fam);
    }
    return project_class_coarse(x, l, g);
}

}  // namespace freetorus
