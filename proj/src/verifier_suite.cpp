#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "freetorus/verifier.hpp"

namespace freetorus {

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

Scalar table_get(const CoeffTable& t, int i, long l, long k, long r, long s) {
    if (r < 0 || s < 0) return Scalar();
    const auto it = t.find(CoeffKey{FamilyIndex{FamilyIndex::Kind::Ilk, 0, i, l, k}, r, s});
    return it == t.end() ? Scalar() : it->second;
}

}  // namespace

// --- Lemma 16 (1): the beta recursion, both sign variants ------------------------

CheckResult Verifier::check_lemma_16_1(int samples) {
    Timer timer;
    CheckResult res{"lemma-16-1", CheckMode::SampledExact, CheckStatus::ReportedVariant,
                    json{{"samples", samples}}};
    Rng rng = Rng::for_check(cfg_.seed, "lemma-16-1");
    const std::vector<GammaKind> kinds = {GammaKind::OnePlus, GammaKind::OneMinus, GammaKind::Two,
                                          GammaKind::Three};
    long plus_hold = 0, minus_hold = 0, both_hold = 0, neither = 0, keys_total = 0;
    int residual_failures = 0;
    for (int t = 0; t < samples; ++t) {
        const int i = static_cast<int>(rng.uniform(1, 2));
        const long gl = rng.uniform(0, 1) == 0 ? rng.uniform(2, 3) : -rng.uniform(2, 3);
        Vector xi;
        const int entries = static_cast<int>(rng.uniform(3, 6));
        for (int e = 0; e < entries; ++e) {
            const GammaKind j = kinds[static_cast<std::size_t>(rng.uniform(0, 3))];
            const long r = rng.uniform(0, 2), s = rng.uniform(0, 2);
            xi += Scalar(rng.small_nonzero(3)) *
                  catalog_.xi_rs(catalog_.gamma(i, gl, j), r, s);
        }
        if (xi.is_zero()) continue;
        Vector residual;
        const CoeffTable beta = catalog_.expand_over_ilk(xi, &residual);
        if (!residual.is_zero()) {
            ++residual_failures;
            continue;
        }
        for (const auto& [key, b] : beta) {
            const long k = key.fam.k;
            if (std::labs(k) < 2) continue;  // variants coincide below |k| = 2
            const int sg = k > 0 ? 1 : -1;
            const long l = key.fam.l;
            Scalar first_sum, second_sum;
            for (long j = 0; j <= std::labs(k) - 1; ++j)
                first_sum += Scalar::d_pow(l * sg * j) *
                             table_get(beta, key.fam.i, l, sg, key.r + j,
                                       key.s + std::labs(k) - j - 1);
            for (long j = 1; j <= std::labs(k) - 1; ++j)
                second_sum += Scalar::d_pow(l * sg * j) *
                              table_get(beta, key.fam.i, l, 0, key.r + j,
                                        key.s + std::labs(k) - j);
            const Scalar pref = Scalar::sqrt3_pow(-std::labs(k));
            const Scalar rhs_plus = pref * (Scalar::sqrt3() * first_sum + second_sum);
            const Scalar rhs_minus = pref * (Scalar::sqrt3() * first_sum - second_sum);
            const bool p_ok = (b == rhs_plus);
            const bool m_ok = (b == rhs_minus);
            ++keys_total;
            if (p_ok && m_ok) ++both_hold;
            else if (p_ok) ++plus_hold;
            else if (m_ok) ++minus_hold;
            else ++neither;
        }
    }
    std::ostringstream note;
    note << "keys with |k|>=2: " << keys_total << "; displayed (+) variant held on "
         << (plus_hold + both_hold) << ", proof (-) variant held on " << (minus_hold + both_hold)
         << ", neither on " << neither;
    if (residual_failures > 0) {
        res.status = CheckStatus::Fail;
        note << "; " << residual_failures << " sample(s) left the xi^{i,l,k} span";
    }
    res.note = note.str();
    res.params["plus"] = plus_hold + both_hold;
    res.params["minus"] = minus_hold + both_hold;
    res.params["neither"] = neither;
    res.params["keys"] = keys_total;
    res.millis = timer.ms();
    return res;
}

// --- Lemma 16 (2): tail decay ------------------------------------------------------

CheckResult Verifier::check_lemma_16_2(int samples) {
    Timer timer;
    CheckResult res{"lemma-16-2", CheckMode::SampledNumeric, CheckStatus::Pass,
                    json{{"samples", samples}}};
    Rng rng = Rng::for_check(cfg_.seed, "lemma-16-2");
    const std::vector<GammaKind> kinds = {GammaKind::OnePlus, GammaKind::OneMinus, GammaKind::Two,
                                          GammaKind::Three};
    double worst_c = 0.0;
    bool monotone = true;
    for (int t = 0; t < samples; ++t) {
        const int i = static_cast<int>(rng.uniform(1, 2));
        const long gl = rng.uniform(0, 1) == 0 ? 2 : 3;
        Vector xi;
        for (int e = 0; e < 4; ++e)
            xi += Scalar(rng.small_nonzero(3)) *
                  catalog_.xi_rs(catalog_.gamma(i, gl, kinds[static_cast<std::size_t>(
                                                      rng.uniform(0, 3))]),
                                 rng.uniform(0, 2), rng.uniform(0, 2));
        if (xi.is_zero()) continue;
        Vector residual;
        const CoeffTable beta = catalog_.expand_over_ilk(xi, &residual);
        const double xnorm = std::abs(norm_sq(xi).eval_numeric(cfg_.theta));
        if (xnorm == 0.0) continue;
        double prev_tail = -1.0;
        for (long k0 = 1; k0 <= 4; ++k0) {
            double tail = 0.0;
            for (const auto& [key, b] : beta)
                if (std::labs(key.fam.k) >= k0) tail += std::norm(b.eval_numeric(cfg_.theta));
            tail /= xnorm;  // normalize to ||xi|| = 1
            if (prev_tail >= 0.0 && tail > prev_tail + cfg_.tolerance) monotone = false;
            prev_tail = tail;
            worst_c = std::max(worst_c, 3.0 * std::pow(2.0, static_cast<double>(k0)) * tail);
        }
    }
    res.ratio = worst_c;  // recorded empirical C of the C / (3 * 2^{k0}) envelope
    if (!monotone) {
        res.status = CheckStatus::Fail;
        res.note = "tail sums not monotone in k0";
    }
    res.millis = timer.ms();
    return res;
}

// --- Lemmas 5-2 / 5-3: telescoping inequality chains ---------------------------------

CheckResult Verifier::check_telescoping(int samples) {
    Timer timer;
    CheckResult res{"telescoping-5-2-5-3", CheckMode::SampledNumeric, CheckStatus::Pass,
                    json{{"samples", samples}}};
    Rng rng = Rng::for_check(cfg_.seed, "telescoping");
    const Vector chi_t = catalog_.chi1_tilde();
    const double inv_s3 = 1.0 / std::sqrt(3.0);
    const std::complex<double> z = unit_circle_point(cfg_.theta);
    double max_ratio = 0.0;
    bool triangle_ok = true;
    int effective = 0;

    for (int t = 0; t <= samples; ++t) {
        CoeffTable alpha;
        if (t > 0) {  // t = 0 is the commuting control: empty table, all sides zero
            const int entries = static_cast<int>(rng.uniform(5, 10));
            for (int e = 0; e < entries; ++e) {
                const int i = static_cast<int>(rng.uniform(1, 2));
                const long l = rng.small_nonzero(2);
                const long k = rng.uniform(-2, 2);
                alpha[CoeffKey{FamilyIndex{FamilyIndex::Kind::Ilk, 0, i, l, k},
                               rng.uniform(0, 3), rng.uniform(0, 3)}] = Scalar(rng.small_nonzero(3));
            }
        }
        Vector x;
        for (const auto& [key, c] : alpha)
            x += c * catalog_.xi_ilk(key.fam.i, key.fam.l, key.fam.k, key.r, key.s);
        const Vector comm = mul_vec(chi_t, x) - mul_vec(x, chi_t);
        const double comm_norm = std::sqrt(std::abs(norm_sq(comm).eval_numeric(cfg_.theta)));

        // Numeric alpha lookup (0 off support / outside the index quadrant).
        auto a_num = [&](int i, long l, long k, long r, long s) -> std::complex<double> {
            const Scalar v = table_get(alpha, i, l, k, r, s);
            return v.is_zero() ? std::complex<double>{} : v.eval_numeric(cfg_.theta);
        };
        // Index window covering the support and its telescoped shifts.
        std::set<std::tuple<int, long, long>> ilk;
        long rmax = 0, smax = 0;
        for (const auto& [key, c] : alpha) {
            rmax = std::max(rmax, key.r);
            smax = std::max(smax, key.s);
            for (long dk = -1; dk <= 1; ++dk)
                ilk.insert({key.fam.i, key.fam.l, key.fam.k + dk});
        }

        for (long s = 1; s <= 2; ++s) {
            // Lemma 5-2 (rows (., 0)); the mirrored Lemma 5-3 follows below.
            double lhs_a = 0.0, lhs_b = 0.0, mid = 0.0;
            for (const auto& [i, l, k] : ilk)
                for (long r = s; r <= rmax + 2 * s + 2; ++r) {
                    std::complex<double> head{};
                    for (long u = 0; u <= s; ++u) head += a_num(i, l, k, r - s + 2 * u, 0);
                    std::complex<double> side{};
                    for (long u = 0; u < s; ++u)
                        side += a_num(i, l, k - 1, r - s + 1 + 2 * u, 0) +
                                a_num(i, l, k + 1, r - s + 1 + 2 * u, 0);
                    const std::complex<double> T = head - inv_s3 * side;
                    lhs_a += std::norm(T);
                    lhs_b += std::norm(a_num(i, l, k, r, s));
                    mid += std::norm(a_num(i, l, k, r, s) - T);
                }
            const double lhs = std::sqrt(lhs_a) - std::sqrt(lhs_b);
            if (lhs > std::sqrt(mid) + 1e-9) triangle_ok = false;
            if (comm_norm > 1e-12) {
                max_ratio = std::max(max_ratio,
                                     std::sqrt(mid) /
                                         (std::pow(3.0, static_cast<double>(s - 1)) * comm_norm));
                ++effective;
            } else if (mid > 1e-18) {
                triangle_ok = false;  // commuting element must have zero telescoped rows
            }

            // Lemma 5-3: columns (0, .) with the d^{+-l} phases.
            double lhs_a2 = 0.0, lhs_b2 = 0.0, mid2 = 0.0;
            for (const auto& [i, l, k] : ilk) {
                const std::complex<double> dl = std::pow(z, static_cast<double>(l));
                for (long s2 = s; s2 <= smax + 2 * s + 2; ++s2) {
                    std::complex<double> head{};
                    for (long u = 0; u <= s; ++u) head += a_num(i, l, k, 0, s2 - s + 2 * u);
                    std::complex<double> side{};
                    for (long u = 0; u < s; ++u)
                        side += dl * a_num(i, l, k - 1, 0, s2 - s + 1 + 2 * u) +
                                (1.0 / dl) * a_num(i, l, k + 1, 0, s2 - s + 1 + 2 * u);
                    const std::complex<double> T = head - inv_s3 * side;
                    lhs_a2 += std::norm(T);
                    lhs_b2 += std::norm(a_num(i, l, k, s, s2));
                    mid2 += std::norm(a_num(i, l, k, s, s2) - T);
                }
            }
            const double lhs2 = std::sqrt(lhs_a2) - std::sqrt(lhs_b2);
            if (lhs2 > std::sqrt(mid2) + 1e-9) triangle_ok = false;
            if (comm_norm > 1e-12)
                max_ratio = std::max(max_ratio,
                                     std::sqrt(mid2) /
                                         (std::pow(3.0, static_cast<double>(s - 1)) * comm_norm));
        }
    }
    res.ratio = max_ratio;  // recorded C_0 estimate; the bound is C_0-relative by design
    res.params["effective_rows"] = effective;
    if (!triangle_ok) {
        res.status = CheckStatus::Fail;
        res.note = "triangle inequality chain violated";
    }
    res.millis = timer.ms();
    return res;
}

// --- AOP experiment --------------------------------------------------------------------

std::vector<Verifier::AopSample> Verifier::aop_samples(int m_level, int seeds) {
    const long M = m_level;
    std::vector<AopSample> out;
    // Pools: low-length complement vectors (the (xi_m) side) and the high-index
    // xi^{i,l,k} system; both shifted to subscripts 2M + r.
    const std::vector<Vector>& pool = catalog_.complement_basis(1, WordGrade::Zero).members;
    std::map<std::tuple<std::size_t, long, long>, Vector> shifted_cache;
    auto shifted = [&](std::size_t idx, long r, long s) -> const Vector& {
        const auto key = std::make_tuple(idx, r, s);
        auto it = shifted_cache.find(key);
        if (it == shifted_cache.end())
            it = shifted_cache.emplace(key, catalog_.xi_rs(pool[idx], 2 * M + r, 2 * M + s)).first;
        return it->second;
    };
    auto ilk_high = [&](Rng& rng) {
        const int i = static_cast<int>(rng.uniform(1, 2));
        const long l = rng.small_nonzero(1);
        const long k = rng.uniform(-1, 1);
        return catalog_.xi_ilk(i, l, k, 2 * M + rng.uniform(0, 1), 2 * M + rng.uniform(0, 1));
    };

    for (int sd = 0; sd < seeds; ++sd) {
        Rng rng = Rng::for_check(cfg_.seed + static_cast<std::uint64_t>(sd) * 0x9e37ull,
                                 "aop-M" + std::to_string(m_level));
        for (int rep = 0; rep < 3; ++rep) {
            const bool admissible = rep < 2;  // rep 2 carries u-syllables (M > 4k violated)
            // g, h: products of normalizer syllables v_i^{m}, alternating factors;
            // the inadmissible variant prepends a u-power syllable.
            auto sample_word = [&](bool with_u) {
                PhasedWord acc{0, Word::identity()};
                int factor = static_cast<int>(rng.uniform(1, 2));
                const int syllables = static_cast<int>(rng.uniform(1, 2));
                for (int t = 0; t < syllables; ++t) {
                    const long m = rng.small_nonzero(2);
                    const long ku = with_u && t == 0 ? rng.small_nonzero(1) : 0;
                    const PhasedWord p =
                        multiply_phased(acc.word, Word::syllable(factor, ku, m));
                    acc = {acc.d_exp + p.d_exp, p.word};
                    factor = 3 - factor;
                }
                return Vector(Scalar::d_pow(acc.d_exp), acc.word);
            };
            const Vector g = sample_word(!admissible);
            const Vector h = sample_word(false);

            auto sample_eta = [&]() {
                Vector eta;
                for (int tries = 0; tries < 4 && eta.is_zero(); ++tries) {
                    eta = Vector();
                    eta += Scalar(rng.small_nonzero(2)) *
                           shifted(static_cast<std::size_t>(rng.uniform(0, 2)), rng.uniform(0, 1),
                                   rng.uniform(0, 1));
                    if (rng.uniform(0, 1) == 1)
                        eta += Scalar(rng.small_nonzero(2)) * ilk_high(rng);
                }
                return eta;
            };
            const Vector eta1 = sample_eta();
            const Vector eta2 = sample_eta();
            if (eta1.is_zero() || eta2.is_zero()) continue;

            const Scalar ip = inner(mul_vec(eta1, g), mul_vec(h, eta2));
            const double num = std::abs(ip.eval_numeric(cfg_.theta));
            const double den = std::sqrt(std::abs(norm_sq(eta1).eval_numeric(cfg_.theta))) *
                               std::sqrt(std::abs(norm_sq(eta2).eval_numeric(cfg_.theta)));
            if (den == 0.0) continue;
            out.push_back({num / den, admissible});
        }
    }
    return out;
}

CheckResult Verifier::check_aop_bound(int m_level, int seeds) {
    Timer timer;
    CheckResult res{"aop-bound-M" + std::to_string(m_level), CheckMode::SampledNumeric,
                    CheckStatus::Pass, json{{"M", m_level}, {"seeds", seeds}}};
    double adm = 0.0, inadm = 0.0;
    int n_adm = 0, n_inadm = 0;
    for (const AopSample& s : aop_samples(m_level, seeds)) {
        if (s.admissible) {
            adm = std::max(adm, s.ratio);
            ++n_adm;
        } else {
            inadm = std::max(inadm, s.ratio);
            ++n_inadm;
        }
    }
    res.ratio = adm;
    res.params["admissible_samples"] = n_adm;
    res.params["inadmissible_samples"] = n_inadm;
    std::ostringstream note;
    note << "max ratio (admissible M > 4k) = " << adm
         << "; max ratio with the hypothesis violated (reported, bound not claimed) = " << inadm
         << "; envelope M^4 3^{-M/2} = "
         << std::pow(m_level, 4) / std::pow(3.0, m_level / 2.0);
    res.note = note.str();
    res.millis = timer.ms();
    return res;
}

CheckResult Verifier::check_aop_decay(int seeds) {
    Timer timer;
    CheckResult res{"aop-decay", CheckMode::SampledNumeric, CheckStatus::Pass,
                    json{{"seeds", seeds}}};
    double m1 = 0.0, m2 = 0.0;
    for (const AopSample& s : aop_samples(1, seeds))
        if (s.admissible) m1 = std::max(m1, s.ratio);
    for (const AopSample& s : aop_samples(2, seeds))
        if (s.admissible) m2 = std::max(m2, s.ratio);
    res.params["max_ratio_M1"] = m1;
    res.params["max_ratio_M2"] = m2;
    res.ratio = (m1 > 0.0) ? m2 / m1 : 0.0;
    if (!(m2 < m1)) {
        res.status = CheckStatus::Fail;
        res.note = "no decay from M=1 to M=2";
    } else {
        res.note = "max ratio decays from M=1 to M=2";
    }
    res.millis = timer.ms();
    return res;
}

// --- suite -------------------------------------------------------------------------------

Report Verifier::run_suite() {
    struct Entry {
        std::string id;
        std::function<CheckResult(bool)> run;  // run(mutated)
        bool has_control;
    };
    const long T = cfg_.truncation;
    std::vector<Entry> entries = {
        {"word-orthonormality", [&](bool m) { return check_word_orthonormality(3, m); }, true},
        {"chi-recursion", [&](bool m) { return check_chi_recursion(6, m); }, true},
        {"lemma-3-3", [&](bool m) { return check_lemma_3_3(3, 3, 3, m); }, true},
        {"lemma-3-4", [&](bool m) { return check_lemma_3_4(3, 3, m); }, true},
        {"lemma-3-5", [&](bool m) { return check_lemma_3_5(3, m); }, true},
        {"lemma-3-6", [&](bool m) { return check_lemma_3_6(3, m); }, true},
        {"lemma-3-7", [&](bool m) { return check_lemma_3_7(std::min<long>(T, 3), m); }, true},
        {"lemma-3-8", [&](bool m) { return check_lemma_3_8(2, m); }, true},
        {"lemma-3-9", [&](bool m) { return check_lemma_3_9(std::min<long>(T, 3), m); }, true},
        {"lemma-7-4", [&](bool m) { return check_lemma_7_4(4, m); }, true},
        {"lemma-8", [&](bool m) { return check_lemma_8(3, m); }, true},
        {"lemma-15", [&](bool m) { return check_lemma_15(2, 2, 3, m); }, true},
        {"lemma-5-1", [&](bool m) { return check_lemma_5_1(2, 2, 3, m); }, true},
        {"section-4-commutator", [&](bool m) { return check_section_4(50, m); }, true},
        {"cor-3", [&](bool m) { return check_cor_3(std::min<long>(T, 3), m); }, true},
        {"lemma-16-1", [&](bool) { return check_lemma_16_1(5); }, false},
        {"lemma-16-2", [&](bool) { return check_lemma_16_2(5); }, false},
        {"telescoping-5-2-5-3", [&](bool) { return check_telescoping(8); }, false},
        {"aop-bound-M1", [&](bool) { return check_aop_bound(1, 20); }, false},
        {"aop-bound-M2", [&](bool) { return check_aop_bound(2, 20); }, false},
        {"aop-decay", [&](bool) { return check_aop_decay(20); }, false},
    };

    const auto selected = [&](const std::string& id) {
        if (cfg_.lemma_filter.empty()) return true;
        for (const std::string& f : cfg_.lemma_filter)
            if (f == id || f + "-negative-control" == id || id == f) return true;
        return false;
    };

    Report rep;
    rep.config = cfg_;
    for (const Entry& e : entries) {
        const bool want_base = selected(e.id);
        const bool want_ctrl =
            e.has_control &&
            (cfg_.lemma_filter.empty() ||
             std::find(cfg_.lemma_filter.begin(), cfg_.lemma_filter.end(),
                       e.id + "-negative-control") != cfg_.lemma_filter.end() ||
             want_base);
        if (want_base) rep.checks.push_back(e.run(false));
        if (want_ctrl) {
            Timer timer;
            const CheckResult inner = e.run(true);
            CheckResult ctrl;
            ctrl.lemma_id = e.id + "-negative-control";
            ctrl.mode = CheckMode::Exact;
            ctrl.params = json{{"mutation_of", e.id}};
            ctrl.status =
                inner.status == CheckStatus::Fail ? CheckStatus::Pass : CheckStatus::Fail;
            if (ctrl.status == CheckStatus::Fail)
                ctrl.note = "mutated run unexpectedly passed (vacuous check)";
            else
                ctrl.note = "mutation failed as expected";
            ctrl.millis = timer.ms();
            rep.checks.push_back(std::move(ctrl));
        }
    }
    std::sort(rep.checks.begin(), rep.checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.lemma_id < b.lemma_id; });
    return rep;
}

}  // namespace freetorus
