#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "freetorus/basis.hpp"

namespace freetorus {

using json = nlohmann::ordered_json;

/// Suite configuration.  theta defaults to the golden-ratio fraction and is
/// the single evaluation point for all exact-vs-numeric cross checks.
struct Config {
    double theta = 0.6180339887498949;  // (sqrt(5) - 1) / 2
    long truncation = 3;
    long truncation_cap = 7;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    std::vector<std::string> lemma_filter;  // empty: run everything
};

enum class CheckStatus { Pass, Fail, ReportedVariant, NotApplicable };
enum class CheckMode { Exact, SampledExact, SampledNumeric };

std::string to_string(CheckStatus s);
std::string to_string(CheckMode m);

struct CheckResult {
    std::string lemma_id;
    CheckMode mode = CheckMode::Exact;
    CheckStatus status = CheckStatus::Pass;
    json params;
    std::optional<double> ratio;          // recorded empirical ratio, when sampled
    std::optional<json> counterexample;   // serialized payload on failure
    std::string note;
    double millis = 0.0;
};

struct Report {
    Config config;
    std::vector<CheckResult> checks;  // sorted by lemma_id

    bool all_exact_pass() const;
    json to_json(bool include_timing = true) const;
    std::string to_markdown() const;
};

/// Deterministic splittable RNG (splitmix64); each check derives its own
/// stream from (seed, lemma id), so results do not depend on scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    static Rng for_check(std::uint64_t seed, const std::string& lemma_id);

    std::uint64_t next();
    /// Uniform in [lo, hi] (inclusive).
    long uniform(long lo, long hi);
    /// Small nonzero integer in [-mag, mag].
    long small_nonzero(long mag);

private:
    std::uint64_t state_;
};

/// The section-4 commutator coefficient map: beta = [chi~_1, .] applied to an
/// alpha-table over the xi^{i,l,k} system, in the four-case piecewise form.
/// The default carries the derived boundary coefficients (the alpha_{1,s},
/// alpha_{r,1}, alpha_{1,0}, alpha_{0,1} transitions scale by 2/3, matching the
/// exact commutator expansion); displayed_variant = true reproduces the
/// paper's displayed table instead, which the verifier reports against the
/// direct expansion rather than silently adopting either way.
CoeffTable commutator_coefficients(const CoeffTable& alpha, bool displayed_variant = false);

json coeff_table_to_json(const CoeffTable& t);
json basis_family_to_json(const BasisFamily& f);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

class Verifier {
public:
    explicit Verifier(Config cfg);

    BasisCatalog& catalog() { return catalog_; }
    const Config& config() const { return cfg_; }

    // Exact checks.  `mutated` selects the check's negative-control mutation
    // (a deliberately perturbed constant that must make the check fail).
    CheckResult check_word_orthonormality(long max_len, bool mutated = false);
    CheckResult check_chi_recursion(long lmax, bool mutated = false);
    CheckResult check_lemma_3_3(long lmax, long rmax, long smax, bool mutated = false);
    CheckResult check_lemma_3_4(long lmax, long box, bool mutated = false);
    CheckResult check_lemma_3_5(long box, bool mutated = false);
    CheckResult check_lemma_3_6(long box, bool mutated = false);
    CheckResult check_lemma_3_7(long truncation, bool mutated = false);
    CheckResult check_lemma_3_8(long box, bool mutated = false);
    CheckResult check_lemma_3_9(long truncation, bool mutated = false);
    CheckResult check_lemma_7_4(long lmax, bool mutated = false);
    CheckResult check_lemma_8(long nm_max, bool mutated = false);
    CheckResult check_lemma_15(long l_abs_max, long k_abs_max, long rs_max, bool mutated = false);
    CheckResult check_lemma_5_1(long l_abs_max, long k_abs_max, long rs_max, bool mutated = false);
    CheckResult check_section_4(int tables, bool mutated = false);
    CheckResult check_cor_3(long truncation, bool mutated = false);

    // Reported-variant and sampled-numeric checks.
    CheckResult check_lemma_16_1(int samples);
    CheckResult check_lemma_16_2(int samples);
    CheckResult check_telescoping(int samples);
    CheckResult check_aop_bound(int m_level, int seeds);
    CheckResult check_aop_decay(int seeds);

    /// Runs every registered check (or the config's lemma filter), including
    /// the negative controls, and aggregates a Report sorted by lemma id.
    Report run_suite();

    /// Numeric shadow of an exact scalar at the configured theta; records the
    /// worst relative deviation seen (used by the acceptance suite).
    void cross_check(const Scalar& exact, std::complex<double> recomputed);
    double worst_cross_check() const { return worst_cross_; }

private:
    struct AopSample {
        double ratio;
        bool admissible;
    };
    std::vector<AopSample> aop_samples(int m_level, int seeds);

    Config cfg_;
    BasisCatalog catalog_;
    double worst_cross_ = 0.0;
};

}  // namespace freetorus
