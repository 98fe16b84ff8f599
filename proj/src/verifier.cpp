#include "freetorus/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

namespace freetorus {

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::ReportedVariant: return "reported-variant";
        case CheckStatus::NotApplicable: return "not-applicable";
    }
    return "?";
}

std::string to_string(CheckMode m) {
    switch (m) {
        case CheckMode::Exact: return "exact";
        case CheckMode::SampledExact: return "sampled-exact";
        case CheckMode::SampledNumeric: return "sampled-numeric";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// RNG

std::uint64_t Rng::next() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Rng Rng::for_check(std::uint64_t seed, const std::string& lemma_id) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : lemma_id) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    Rng r(seed ^ h);
    r.next();
    return r;
}

long Rng::uniform(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    // Rejection sampling keeps the stream implementation-independent.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return lo + static_cast<long>(v % span);
}

long Rng::small_nonzero(long mag) {
    long v = 0;
    while (v == 0) v = uniform(-mag, mag);
    return v;
}

// ---------------------------------------------------------------------------
// JSON serialization

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (const auto& [w, c] : v.support())
        arr.push_back({{"word", w.to_string()}, {"coeff", c.to_string()}});
    return arr;
}

Vector vector_from_json(const json& j) {
    Vector v;
    for (const auto& e : j) {
        const ScaledWord sw = parse_word_literal(e.at("word").get<std::string>());
        const Scalar c = Scalar::parse(e.at("coeff").get<std::string>());
        v.add_term(sw.word, c * sw.coeff);
    }
    return v;
}

json coeff_table_to_json(const CoeffTable& t) {
    json arr = json::array();
    for (const auto& [key, c] : t)
        arr.push_back({{"family", key.fam.to_string()},
                       {"r", key.r},
                       {"s", key.s},
                       {"coeff", c.to_string()}});
    return arr;
}

json basis_family_to_json(const BasisFamily& f) {
    json members = json::array();
    for (const Vector& m : f.members) members.push_back(vector_to_json(m));
    json gram = json::array();
    for (std::size_t i = 0; i < f.gram.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < f.gram.cols(); ++j) row.push_back(f.gram.at(i, j).to_string());
        gram.push_back(row);
    }
    return {{"label", f.label}, {"l", f.l}, {"members", members}, {"gram", gram}};
}

namespace {

/// Short preview of a vector for counterexample payloads.
json vec_preview(const Vector& v) {
    json arr = json::array();
    std::size_t n = 0;
    for (const auto& [w, c] : v.support()) {
        if (++n > 12) {
            arr.push_back("... (" + std::to_string(v.term_count()) + " terms total)");
            break;
        }
        arr.push_back(c.to_string() + " * " + w.to_string());
    }
    return arr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Report

bool Report::all_exact_pass() const {
    for (const CheckResult& c : checks) {
        if (c.mode == CheckMode::Exact && c.status == CheckStatus::Fail) return false;
    }
    return true;
}

json Report::to_json(bool include_timing) const {
    json checks_json = json::array();
    for (const CheckResult& c : checks) {
        json e;
        e["lemma_id"] = c.lemma_id;
        e["mode"] = to_string(c.mode);
        e["status"] = to_string(c.status);
        e["params"] = c.params;
        if (c.ratio) e["ratio"] = *c.ratio;
        if (!c.note.empty()) e["note"] = c.note;
        if (c.counterexample) e["counterexample"] = *c.counterexample;
        if (include_timing) e["millis"] = c.millis;
        checks_json.push_back(std::move(e));
    }
    json j;
    j["schema"] = "freetorus-report-v1";
    j["config"] = {{"theta", config.theta},
                   {"truncation", config.truncation},
                   {"seed", config.seed},
                   {"tolerance", config.tolerance}};
    j["all_exact_pass"] = all_exact_pass();
    j["checks"] = std::move(checks_json);
    return j;
}

std::string Report::to_markdown() const {
    std::ostringstream out;
    out << "| lemma | mode | status | ratio | note |\n";
    out << "|---|---|---|---|---|\n";
    for (const CheckResult& c : checks) {
        out << "| " << c.lemma_id << " | " << to_string(c.mode) << " | " << to_string(c.status)
            << " | ";
        if (c.ratio) out << *c.ratio;
        out << " | " << c.note << " |\n";
    }
    out << "\nall exact checks pass: " << (all_exact_pass() ? "yes" : "no") << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// The section-4 commutator coefficient map

namespace {

Scalar table_at(const CoeffTable& t, int i, long l, long k, long r, long s) {
    if (r < 0 || s < 0) return Scalar();
    const auto it = t.find(CoeffKey{FamilyIndex{FamilyIndex::Kind::Ilk, 0, i, l, k}, r, s});
    return it == t.end() ? Scalar() : it->second;
}

}  // namespace

CoeffTable commutator_coefficients(const CoeffTable& alpha, bool displayed_variant) {
    // Candidate output keys: neighbors of the support in (r, s, k).
    std::set<CoeffKey> keys;
    for (const auto& [key, c] : alpha) {
        if (key.fam.kind != FamilyIndex::Kind::Ilk)
            throw DomainError("commutator_coefficients: alpha must be an (i,l,k) table");
        for (const long dr : {-1L, 0L, 1L})
            for (const long ds : {-1L, 0L, 1L})
                for (const long dk : {-1L, 0L, 1L}) {
                    CoeffKey k2 = key;
                    k2.r += dr;
                    k2.s += ds;
                    k2.fam.k += dk;
                    if (k2.r >= 0 && k2.s >= 0) keys.insert(k2);
                }
    }
    const Scalar inv_s3 = Scalar::sqrt3_pow(-1);
    // The chi~_1 action on the r = 1 (resp. s = 1) vectors drops to the r = 0
    // row with weight 2/3: the xi^{i,l,k}_{1,s} prefix pool has two cancelling
    // extensions, not three.  The displayed variant uses weight 1 throughout.
    const Scalar drop = displayed_variant ? Scalar(1) : Scalar(Rational(2, 3));
    CoeffTable beta;
    for (const CoeffKey& key : keys) {
        const int i = key.fam.i;
        const long l = key.fam.l, k = key.fam.k, r = key.r, s = key.s;
        auto a = [&](long rr, long ss, long kk) { return table_at(alpha, i, l, kk, rr, ss); };
        Scalar b;
        if (r >= 1 && s >= 1) {
            b = a(r + 1, s, k) + a(r - 1, s, k) - a(r, s + 1, k) - a(r, s - 1, k);
        } else if (r == 0 && s >= 1) {
            b = drop * a(1, s, k) - a(0, s - 1, k) - a(0, s + 1, k) +
                inv_s3 * (Scalar::d_pow(l) * a(0, s, k - 1) + Scalar::d_pow(-l) * a(0, s, k + 1));
        } else if (r >= 1 && s == 0) {
            b = a(r - 1, 0, k) + a(r + 1, 0, k) - drop * a(r, 1, k) -
                inv_s3 * (a(r, 0, k - 1) + a(r, 0, k + 1));
        } else {
            b = drop * (a(1, 0, k) - a(0, 1, k)) +
                inv_s3 * (Scalar::d_pow(l) - Scalar(1)) *
                    (a(0, 0, k - 1) - Scalar::d_pow(-l) * a(0, 0, k + 1));
        }
        if (!b.is_zero()) beta[key] = b;
    }
    return beta;
}

// ---------------------------------------------------------------------------
// Verifier

Verifier::Verifier(Config cfg) : cfg_(cfg), catalog_(cfg.truncation_cap) {}

void Verifier::cross_check(const Scalar& exact, std::complex<double> recomputed) {
    const std::complex<double> ev = exact.eval_numeric(cfg_.theta);
    const double scale = std::max({1.0, std::abs(ev), std::abs(recomputed)});
    worst_cross_ = std::max(worst_cross_, std::abs(ev - recomputed) / scale);
}

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

struct Failures {
    int count = 0;
    json first;

    void record(json ce) {
        if (count == 0) first = std::move(ce);
        ++count;
    }
    void merge(const Failures& other) {
        if (count == 0 && other.count > 0) first = other.first;
        count += other.count;
    }
    void finish(CheckResult& res) const {
        if (count > 0) {
            res.status = CheckStatus::Fail;
            res.counterexample = first;
            res.note = std::to_string(count) + " failing case(s)";
        }
    }
};

}  // namespace

// --- word orthonormality (the length <= N pairwise oracle) ------------------

CheckResult Verifier::check_word_orthonormality(long max_len, bool mutated) {
    Timer timer;
    CheckResult res{"word-orthonormality", CheckMode::Exact, CheckStatus::Pass,
                    json{{"max_len", max_len}, {"mutated", mutated}}};
    std::vector<const Word*> words;
    for (long l = 0; l <= max_len; ++l)
        for (const Word& w : words_of_length(l)) words.push_back(&w);
    const std::size_t n = words.size();
    res.params["word_count"] = n;

    const long expected_phase = mutated ? 1 : 0;  // mutation: tau(w* w) = d instead of 1
    Failures fails;
    double worst_local = 0.0;
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Failures local;
        double worst_thread = 0.0;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64) nowait
#endif
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                // tau(w_b^* w_a) via full normal-form expansion.
                const PhasedWord adj = adjoint_phased(*words[b]);
                const PhasedWord prod = multiply_phased(adj.word, *words[a]);
                const long phase = adj.d_exp + prod.d_exp;
                const bool is_id = prod.word.is_identity();
                bool ok;
                if (a == b) {
                    ok = is_id && phase == expected_phase;
                } else {
                    ok = !is_id;  // off-diagonal trace vanishes on non-identity words
                }
                if (!ok) {
                    local.record(json{{"a", words[a]->to_string()},
                                      {"b", words[b]->to_string()},
                                      {"normal_form_phase", phase},
                                      {"identity", is_id}});
                }
                // Periodically exercise the full Vector path and the numeric
                // shadow (independent complex recomputation of the trace).
                if ((a * 131 + b) % 997 == 0) {
                    const Vector va{*words[a]}, vb{*words[b]};
                    const Scalar exact_tr = trace(mul_vec(adjoint_vec(vb), va, Exec::Serial));
                    const Scalar exact_inner = inner(va, vb);
                    if (exact_tr != exact_inner)
                        local.record(json{{"a", words[a]->to_string()},
                                          {"b", words[b]->to_string()},
                                          {"trace", exact_tr.to_string()},
                                          {"inner", exact_inner.to_string()}});
                    const NumericVector na = NumericVector::from_exact(va, cfg_.theta);
                    const NumericVector nb = NumericVector::from_exact(vb, cfg_.theta);
                    const std::complex<double> num = inner_numeric(na, nb);
                    const std::complex<double> ev = exact_inner.eval_numeric(cfg_.theta);
                    worst_thread = std::max(worst_thread,
                                            std::abs(ev - num) / std::max(1.0, std::abs(num)));
                }
            }
        }
#ifdef _OPENMP
#pragma omp critical
#endif
        {
            fails.merge(local);
            worst_local = std::max(worst_local, worst_thread);
        }
    }
    worst_cross_ = std::max(worst_cross_, worst_local);
    fails.finish(res);
    res.millis = timer.ms();
    return res;
}

// --- chi recursion -----------------------------------------------------------

CheckResult Verifier::check_chi_recursion(long lmax, bool mutated) {
    Timer timer;
    CheckResult res{"chi-recursion", CheckMode::Exact, CheckStatus::Pass,
                    json{{"lmax", lmax}, {"mutated", mutated}}};
    if (lmax < 2) throw DomainError("check_chi_recursion: lmax must be >= 2");
    Failures fails;
    const Scalar three = mutated ? Scalar(2) : Scalar(3);

    // chi_1 chi_1 = chi_2 + 4
    {
        const Vector lhs = mul_vec(catalog_.chi(1), catalog_.chi(1));
        const Vector rhs = catalog_.chi(2) + Scalar(4) * Vector::identity();
        if (lhs != rhs)
            fails.record(json{{"case", "chi1*chi1"}, {"diff", vec_preview(lhs - rhs)}});
    }
    for (long l = 2; l <= lmax; ++l) {
        const Vector& chi_l = catalog_.chi(l);
        const Vector rhs = catalog_.chi(l + 1) + three * catalog_.chi(l - 1);
        const Vector left = mul_vec(chi_l, catalog_.chi(1));
        const Vector right = mul_vec(catalog_.chi(1), chi_l);
        if (left != rhs)
            fails.record(json{{"case", "chi_l*chi_1"}, {"l", l}, {"diff", vec_preview(left - rhs)}});
        if (right != left)
            fails.record(json{{"case", "chi_1*chi_l != chi_l*chi_1"}, {"l", l}});
    }
    // Numeric shadow for the small cases: recompute chi_l * chi_1 coefficients
    // through the floating path and compare.
    for (long l = 2; l <= std::min<long>(3, lmax); ++l) {
        const NumericVector a = NumericVector::from_exact(catalog_.chi(l), cfg_.theta);
        const NumericVector b = NumericVector::from_exact(catalog_.chi(1), cfg_.theta);
        const NumericVector prod = mul_numeric(a, b, cfg_.theta);
        const Vector exact = mul_vec(catalog_.chi(l), catalog_.chi(1));
        std::size_t idx = 0;
        for (const auto& [w, c] : exact.support()) {
            if (idx++ % 7 != 0) continue;
            const auto it = prod.support().find(w);
            cross_check(c, it == prod.support().end() ? 0.0 : it->second);
        }
    }
    fails.finish(res);
    res.millis = timer.ms();
    return res;
}

// --- shared family builders ---------------------------------------------------

namespace {

/// The Lemma 3-6/3-8 vector classes at length l >= 2:
/// (W^0 - S) + (W^{1,a,2} + (W^{1,b} - S)) + (W^2 - S).
std::vector<Vector> lemma_36_family(BasisCatalog& cat, long l, Rng* rng) {
    std::vector<Vector> fam;
    const auto push_all = [&fam](const std::vector<Vector>& vs) {
        fam.insert(fam.end(), vs.begin(), vs.end());
    };
    push_all(cat.complement_basis(l, WordGrade::Zero).members);
    const W1Decomposition& d = cat.w1_decomposition(l);
    push_all(d.alpha2.members);
    push_all(d.beta.members);
    push_all(cat.complement_basis(l, WordGrade::Two).members);
    if (rng && fam.size() >= 2) {
        // Two random cross-class combinations with small integer coefficients.
        for (int t = 0; t < 2; ++t) {
            Vector combo;
            for (const Vector& f : fam) {
                const long c = rng->uniform(-2, 2);
                if (c != 0) combo += Scalar(c) * f;
            }
            if (!combo.is_zero()) fam.push_back(std::move(combo));
        }
    }
    return fam;
}

/// l = 1 epsilon-form vector c1 (u1 + e u1^{-1}) + c2 (u2 + e u2^{-1});
/// membership in W_1^0 - S_1^0 forces c2 = -c1 when e = +1.
Vector eps_vector(int eps, const Scalar& c1, const Scalar& c2) {
    Vector v;
    v += c1 * (Vector(Word::syllable(1, 1, 0)) + Scalar(eps) * Vector(Word::syllable(1, -1, 0)));
    v += c2 * (Vector(Word::syllable(2, 1, 0)) + Scalar(eps) * Vector(Word::syllable(2, -1, 0)));
    return v;
}

std::vector<std::pair<int, Vector>> eps_samples(Rng& rng, int per_eps) {
    std::vector<std::pair<int, Vector>> out;
    out.emplace_back(-1, eps_vector(-1, Scalar(1), Scalar()));
    out.emplace_back(-1, eps_vector(-1, Scalar(), Scalar(1)));
    out.emplace_back(+1, eps_vector(+1, Scalar(1), Scalar(-1)));
    for (int t = 0; t < per_eps; ++t) {
        out.emplace_back(-1, eps_vector(-1, Scalar(rng.small_nonzero(4)), Scalar(rng.uniform(-4, 4))));
        const long c = rng.small_nonzero(4);
        out.emplace_back(+1, eps_vector(+1, Scalar(c), Scalar(-c)));
    }
    return out;
}

}  // namespace

// --- Lemma 3-3 ---------------------------------------------------------------

CheckResult Verifier::check_lemma_3_3(long lmax, long rmax, long smax, bool mutated) {
    Timer timer;
    CheckResult res{"lemma-3-3", CheckMode::Exact, CheckStatus::Pass,
                    json{{"lmax", lmax}, {"rmax", rmax}, {"smax", smax}, {"mutated", mutated}}};
    const Scalar three = mutated ? Scalar(2) : Scalar(3);
    Failures corrected_fails;   // gate: the derived boundary-corrected identity
    Failures displayed_fails;   // reported: the identity with coefficient 3 throughout
    const Vector& chi1 = catalog_.chi(1);
    for (long l = 1; l <= lmax; ++l) {
        std::vector<Vector> fam;
        for (const WordGrade g : {WordGrade::Zero, WordGrade::One, WordGrade::Two}) {
            const auto& members = catalog_.complement_basis(l, g).members;
            fam.insert(fam.end(), members.begin(), members.end());
        }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (std::size_t fi = 0; fi < fam.size(); ++fi) {
            const Vector& xi = fam[fi];
            std::map<std::pair<long, long>, Vector> cache;
            auto xi_rs = [&](long r, long s) -> const Vector& {
                auto it = cache.find({r, s});
                if (it == cache.end())
                    it = cache.emplace(std::make_pair(r, s), catalog_.xi_rs(xi, r, s)).first;
                return it->second;
            };
            Failures corr_local, disp_local;
            for (long r = 1; r <= rmax; ++r)
                for (long s = 0; s <= smax; ++s) {
                    const Vector lhs = mul_vec(chi1, xi_rs(r, s), Exec::Serial);
                    const Vector rhs = xi_rs(r + 1, s) + three * xi_rs(r - 1, s);
                    // Words led by a bare v-power have a fourth left extension;
                    // the r = 1 drop picks up their xi_{0,s} contribution once more.
                    Vector rhs_corr = rhs;
                    if (r == 1) rhs_corr += catalog_.xi_rs(bare_v_led_part(xi), 0, s);
                    if (lhs != rhs_corr)
                        corr_local.record(json{{"side", "left"}, {"l", l}, {"r", r}, {"s", s},
                                               {"diff", vec_preview(lhs - rhs_corr)}});
                    if (lhs != rhs)
                        disp_local.record(json{{"side", "left"}, {"l", l}, {"r", r}, {"s", s},
                                               {"diff", vec_preview(lhs - rhs)}});
                }
            for (long r = 0; r <= rmax; ++r)
                for (long s = 1; s <= smax; ++s) {
                    const Vector lhs = mul_vec(xi_rs(r, s), chi1, Exec::Serial);
                    const Vector rhs = xi_rs(r, s + 1) + three * xi_rs(r, s - 1);
                    Vector rhs_corr = rhs;
                    if (s == 1) rhs_corr += catalog_.xi_rs(bare_v_trailing_part(xi), r, 0);
                    if (lhs != rhs_corr)
                        corr_local.record(json{{"side", "right"}, {"l", l}, {"r", r}, {"s", s},
                                               {"diff", vec_preview(lhs - rhs_corr)}});
                    if (lhs != rhs)
                        disp_local.record(json{{"side", "right"}, {"l", l}, {"r", r}, {"s", s},
                                               {"diff", vec_preview(lhs - rhs)}});
                }
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                corrected_fails.merge(corr_local);
                displayed_fails.merge(disp_local);
            }
        }
    }
    corrected_fails.finish(res);
    res.params["displayed_failures"] = displayed_fails.count;
    if (res.status == CheckStatus::Pass && displayed_fails.count > 0) {
        res.status = CheckStatus::ReportedVariant;
        res.note = "corrected boundary form exact on the full box; the displayed coefficient-3 "
                   "form fails on " + std::to_string(displayed_fails.count) +
                   " r=1/s=1 cells with bare-v boundary words";
        res.counterexample = displayed_fails.first;
    }
    res.millis = timer.ms();
    return res;
}

// --- Lemma 3-4 ---------------------------------------------------------------

CheckResult Verifier::check_lemma_3_4(long lmax, long box, bool mutated) {
    Timer timer;
    CheckResult res{"lemma-3-4", CheckMode::Exact, CheckStatus::Pass,
                    json{{"lmax", lmax}, {"box", box}, {"mutated", mutated}}};
    Failures fails;
    const Vector& chi1 = catalog_.chi(1);

    if (mutated) {
        // Negative control: drop the orthogonality hypothesis and feed the
        // excluded v_i^{+-l} vectors; the identity must break at some s >= 1.
        bool any_violation = false;
        for (long l = 1; l <= lmax && !any_violation; ++l) {
            const Vector vl(Word::syllable(1, 0, l));
            for (long s = 1; s <= box && !any_violation; ++s) {
                const Vector lhs = mul_vec(chi1, catalog_.xi_rs(vl, 0, s));
                const Vector rhs = catalog_.xi_rs(vl, 1, s);
                if (lhs != rhs) any_violation = true;
            }
        }
        res.status = any_violation ? CheckStatus::Fail : CheckStatus::Pass;
        if (any_violation)
            res.counterexample = json{{"note", "hypothesis dropped: v_i^l violates the identity"}};
        res.millis = timer.ms();
        return res;
    }

    for (long l = 1; l <= lmax; ++l) {
        // Basis of {xi in (W^1 + W^2) - S_l : xi  orthogonal to u_i^{+-1} v_i^{+-(l-1)}
        // and v_i^{+-l}}, all sign combinations.
        std::vector<Vector> members;
        for (const WordGrade g : {WordGrade::One, WordGrade::Two}) {
            const auto& ms = catalog_.complement_basis(l, g).members;
            members.insert(members.end(), ms.begin(), ms.end());
        }
        if (members.empty()) continue;
        std::vector<Word> constraints;
        for (int i = 1; i <= 2; ++i) {
            for (const long a : {1L, -1L})
                for (const long c : {l - 1, -(l - 1)}) {
                    const Word w = Word::syllable(i, a, c);
                    if (std::find(constraints.begin(), constraints.end(), w) == constraints.end())
                        constraints.push_back(w);
                }
            constraints.push_back(Word::syllable(i, 0, l));
            constraints.push_back(Word::syllable(i, 0, -l));
        }
        Matrix pairing(constraints.size(), members.size());
        for (std::size_t a = 0; a < constraints.size(); ++a)
            for (std::size_t j = 0; j < members.size(); ++j)
                pairing.at(a, j) = members[j].coeff(constraints[a]);  // <m_j, w_a>
        std::vector<Vector> fam;
        for (const auto& coeffs : kernel_basis(pairing)) fam.push_back(vec_combine(coeffs, members));
        res.params["dim_l" + std::to_string(l)] = fam.size();

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (std::size_t fi = 0; fi < fam.size(); ++fi) {
            const Vector& xi = fam[fi];
            Failures local;
            for (long s = 0; s <= box; ++s) {
                const Vector lhs = mul_vec(chi1, catalog_.xi_rs(xi, 0, s), Exec::Serial);
                const Vector rhs = catalog_.xi_rs(xi, 1, s);
                if (lhs != rhs)
                    local.record(json{{"side", "left"}, {"l", l}, {"s", s},
                                      {"diff", vec_preview(lhs - rhs)}});
            }
            for (long r = 0; r <= box; ++r) {
                const Vector lhs = mul_vec(catalog_.xi_rs(xi, r, 0), chi1, Exec::Serial);
                const Vector rhs = catalog_.xi_rs(xi, r, 1);
                if (lhs != rhs)
                    local.record(json{{"side", "right"}, {"l", l}, {"r", r},
                                      {"diff", vec_preview(lhs - rhs)}});
            }
#ifdef _OPENMP
#pragma omp critical
#endif
            fails.merge(local);
        }
    }
    fails.finish(res);
    res.millis = timer.ms();
    return res;
}

// --- Lemma 3-5 ---------------------------------------------------------------

CheckResult Verifier::check_lemma_3_5(long box, bool mutated) {
    Timer timer;
    CheckResult res{"lemma-3-5", CheckMode::Exact, CheckStatus::Pass,
                    json{{"box", box}, {"mutated", mutated}}};
    Failures fails;
    const Vector& chi1 = catalog_.chi(1);

    // (1) W_l^0 - S_l^0 for l = 2, 3: plain chi_1 xi_{0,s} = xi_{1,s}.
    for (long l = 2; l <= 3; ++l) {
        for (const Vector& xi : catalog_.complement_basis(l, WordGrade::Zero).members) {
            for (long s = 0; s <= box; ++s) {
                const Vector lhs = mul_vec(chi1, catalog_.xi_rs(xi, 0, s));
                Vector rhs = catalog_.xi_rs(xi, 1, s);
                if (mutated && s >= 1) rhs += catalog_.xi_rs(xi, 0, s - 1);
                if (lhs != rhs)
                    fails.record(json{{"part", 1}, {"l", l}, {"s", s},
                                      {"diff", vec_preview(lhs - rhs)}});
            }
            for (long r = 0; r <= box; ++r) {
                const Vector lhs = mul_vec(catalog_.xi_rs(xi, r, 0), chi1);
                const Vector rhs = catalog_.xi_rs(xi, r, 1);
                if (!mutated && lhs != rhs)
                    fails.record(json{{"part", 1}, {"side", "right"}, {"l", l}, {"r", r},
                                      {"diff", vec_preview(lhs - rhs)}});
            }
        }
    }

    // (2) l = 1 epsilon families: chi_1 xi_{0,s} = xi_{1,s} - eps xi_{0,s-1}.
    Rng rng = Rng::for_check(cfg_.seed, "lemma-3-5");
    for (const auto& [eps, xi] : eps_samples(rng, 2)) {
        const Scalar e(eps);
        for (long s = 0; s <= box; ++s) {
            const Vector lhs = mul_vec(chi1, catalog_.xi_rs(xi, 0, s));
            const Vector rhs = catalog_.xi_rs(xi, 1, s) - e * catalog_.xi_rs(xi, 0, s - 1);
            if (lhs != rhs)
                fails.record(json{{"part", 2}, {"eps", eps}, {"s", s},
                                  {"diff", vec_preview(lhs - rhs)}});
        }
        for (long r = 0; r <= box; ++r) {
            const Vector lhs = mul_vec(catalog_.xi_rs(xi, r, 0), chi1);
            const Vector rhs = catalog_.xi_rs(xi, r, 1) - e * catalog_.xi_rs(xi, r - 1, 0);
            if (lhs != rhs)
                fails.record(json{{"part", 2}, {"side", "right"}, {"eps", eps}, {"r", r},
                                  {"diff", vec_preview(lhs - rhs)}});
        }
    }
    fails.finish(res);
    res.millis = timer.ms();
    return res;
}

// --- Lemma 3-6 ---------------------------------------------------------------

CheckResult Verifier::check_lemma_3_6(long box, bool mutated) {
    Timer timer;
    CheckResult res{"lemma-3-6", CheckMode::Exact, CheckStatus::Pass,
                    json{{"box", box}, {"mutated", mutated}}};
    // Gate: members with u-letter boundaries on every word (there the displayed
    // expansion is exact).  Members with bare-v boundary words inherit the
    // r = 1 defect of the recursions; their failures are reported, not gated.
    Failures fails;
    Failures offcore_fails;
    long core_members = 0, offcore_members = 0;
    Rng rng = Rng::for_check(cfg_.seed, "lemma-3-6");

    for (long l = 2; l <= 3; ++l) {
        std::vector<Vector> fam = lemma_36_family(catalog_, l, nullptr);
        // Random combinations within the core part keep the gate honest on
        // mixed vectors as well.
        std::vector<std::size_t> core_idx;
        for (std::size_t i = 0; i < fam.size(); ++i)
            if (is_u_boundary_vector(fam[i])) core_idx.push_back(i);
        std::vector<Vector> combos;
        for (int t = 0; t < 2 && core_idx.size() >= 2; ++t) {
            Vector combo;
            for (const std::size_t i : core_idx) {
                const long c = rng.uniform(-2, 2);
                if (c != 0) combo += Scalar(c) * fam[i];
            }
            if (!combo.is_zero()) combos.push_back(std::move(combo));
        }
        fam.insert(fam.end(), combos.begin(), combos.end());
        res.params["family_l" + std::to_string(l)] = fam.size();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
        for (std::size_t fi = 0; fi < fam.size(); ++fi) {
            const Vector& xi = fam[fi];
            const bool is_core = is_u_boundary_vector(xi);
            Failures local;
            std::map<std::pair<long, long>, Vector> prod_cache;
            auto chi_prod = [&](long n, long m) -> const Vector& {
                auto it = prod_cache.find({n, m});
                if (it == prod_cache.end()) {
                    Vector p = mul_vec(mul_vec(catalog_.chi(n), xi, Exec::Serial),
                                       catalog_.chi(m), Exec::Serial);
                    it = prod_cache.emplace(std::make_pair(n, m), std::move(p)).first;
                }
                return it->second;
            };
            for (long n = 0; n <= box; ++n)
                for (long m = 0; m <= box; ++m) {
                    // (1)(i)
                    Vector rhs = catalog_.xi_rs(xi, n, m) - catalog_.xi_rs(xi, n, m - 2) -
                                 catalog_.xi_rs(xi, n - 2, m);
                    if (!mutated) rhs += catalog_.xi_rs(xi, n - 2, m - 2);
                    if (chi_prod(n, m) != rhs)
                        local.record(json{{"part", "1i"}, {"l", l}, {"n", n}, {"m", m},
                                          {"core", is_core},
                                          {"diff", vec_preview(chi_prod(n, m) - rhs)}});
                    // (1)(ii)
                    Vector sum;
                    for (long r = n % 2; r <= n; r += 2)
                        for (long s = m % 2; s <= m; s += 2) sum += chi_prod(r, s);
                    const Vector xirs = catalog_.xi_rs(xi, n, m);
                    if (sum != xirs)
                        local.record(json{{"part", "1ii"}, {"l", l}, {"n", n}, {"m", m},
                                          {"core", is_core},
                                          {"diff", vec_preview(sum - xirs)}});
                }
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (is_core) {
                    fails.merge(local);
                    ++core_members;
                } else {
                    offcore_fails.merge(local);
                    ++offcore_members;
                }
            }
        }
    }

    // (2) l = 1 epsilon families.
    for (const auto& [eps, xi] : eps_samples(rng, 1)) {
        const Scalar e(eps);
        std::map<std::pair<long, long>, Vector> prod_cache;
        auto chi_prod = [&](long n, long m) -> const Vector& {
            auto it = prod_cache.find({n, m});
            if (it == prod_cache.end())
                it = prod_cache
                         .emplace(std::make_pair(n, m),
                                  mul_vec(mul_vec(catalog_.chi(n), xi), catalog_.chi(m)))
                         .first;
            return it->second;
        };
        for (long n = 0; n <= box; ++n)
            for (long m = 0; m <= box; ++m) {
                // (2)(i)
                Vector rhs = catalog_.xi_rs(xi, n, m) - catalog_.xi_rs(xi, n, m - 2) -
                             catalog_.xi_rs(xi, n - 2, m) + catalog_.xi_rs(xi, n - 2, m - 2);
                for (long k = 2; k <= n + m + 2; ++k) {
                    Scalar sgn((k % 2 == 0) ? 1 : -eps);  // (-eps)^k
                    Vector corr = e * catalog_.xi_rs(xi, n - k - 1, m - k + 1) +
                                  e * catalog_.xi_rs(xi, n - k + 1, m - k - 1) +
                                  Scalar(2) * catalog_.xi_rs(xi, n - k, m - k);
                    rhs += sgn * corr;
                }
                if (chi_prod(n, m) != rhs)
                    fails.record(json{{"part", "2i"}, {"eps", eps}, {"n", n}, {"m", m},
                                      {"diff", vec_preview(chi_prod(n, m) - rhs)}});
                // (2)(ii)
                Vector sum;
                for (long r = 0; r <= n; ++r)
                    for (long s = 0; s <= m; ++s) {
                        if (((r - s) - (n - m)) % 2 != 0) continue;
                        const Scalar c(((n - r) % 2 == 0) ? 1 : eps);  // eps^{n-r}
                        sum += c * chi_prod(r, s);
                    }
                const Vector xirs = catalog_.xi_rs(xi, n, m);
                if (sum != xirs)
                    fails.record(json{{"part", "2ii"}, {"eps", eps}, {"n", n}, {"m", m},
                                      {"diff", vec_preview(sum - xirs)}});
            }
    }
    fails.finish(res);
    res.params["core_members"] = core_members;
    res.params["offcore_members"] = offcore_members;
    res.params["offcore_failures"] = offcore_fails.count;
    if (res.status == CheckStatus::Pass && offcore_fails.count > 0) {
        res.status = CheckStatus::ReportedVariant;
        res.note = "exact on all u-boundary members and the l=1 epsilon forms; the displayed "
                   "expansion fails on " + std::to_string(offcore_fails.count) +
                   " cells of members with bare-v boundary words";
        res.counterexample = offcore_fails.first;
    }
    res.millis = timer.ms();
    return res;
}

}  // namespace freetorus
