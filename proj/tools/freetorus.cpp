#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "freetorus/verifier.hpp"

using namespace freetorus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

std::string scaled_word_str(const ScaledWord& sw) {
    return sw.coeff.to_string() + " * " + sw.word.to_string();
}

/// Tiny expression grammar for --expr: product of chi<N> factors and
/// parenthesized vector literals, e.g. "chi1*chi1" or "chi2*(1 * u1)".
Vector parse_expr(BasisCatalog& cat, const std::string& text) {
    Vector acc = Vector::identity();
    std::size_t i = 0;
    auto skip_ws = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    bool first = true;
    while (skip_ws(), i < text.size()) {
        if (!first) {
            if (text[i] != '*') throw ParseError("expected '*' between factors", i);
            ++i;
            skip_ws();
        }
        first = false;
        if (text.compare(i, 3, "chi") == 0) {
            i += 3;
            std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            if (start == i) throw ParseError("expected an index after 'chi'", i);
            acc = mul_vec(acc, cat.chi(std::stol(text.substr(start, i - start))));
        } else if (text[i] == '(') {
            int depth = 0;
            std::size_t start = ++i;
            while (i < text.size() && (text[i] != ')' || depth > 0)) {
                if (text[i] == '(') ++depth;
                if (text[i] == ')') --depth;
                ++i;
            }
            if (i >= text.size()) throw ParseError("unbalanced parenthesis", start);
            acc = mul_vec(acc, parse_vector_literal(text.substr(start, i - start)));
            ++i;
        } else {
            throw ParseError("expected chi<N> or a parenthesized vector literal", i);
        }
    }
    return acc;
}

void print_scalar(const Scalar& s, std::optional<double> theta) {
    std::cout << s.to_string() << "\n";
    if (theta) {
        const std::complex<double> v = s.eval_numeric(*theta);
        std::cout << "  at theta = " << *theta << ": " << v.real()
                  << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freetorus: exact word combinatorics of the free product of two "
                 "d-deformed tori, with a lemma verification suite"};
    app.set_config("--config", "", "Read options from a TOML/INI config file");
    app.require_subcommand(1);

    double theta = 0.6180339887498949;
    long truncation = 3;
    long truncation_cap = 7;
    bool unsafe_truncation = false;
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    app.add_option("--theta", theta, "Evaluation point d = exp(2 pi i theta); theta should be irrational")
        ->envname("FREETORUS_THETA")
        ->capture_default_str();
    app.add_option("--truncation", truncation, "Word-length truncation for subspace checks")
        ->envname("FREETORUS_TRUNCATION")
        ->capture_default_str();
    app.add_flag("--unsafe-truncation", unsafe_truncation,
                 "Lift the hard truncation cap (word counts grow like 3^l)");
    app.add_option("--seed", seed, "Seed for the sampled checks")
        ->envname("FREETORUS_SEED")
        ->capture_default_str();
    app.add_option("--tolerance", tolerance, "Numeric tolerance for exact-vs-float cross checks")
        ->capture_default_str();

    // nf
    auto* nf = app.add_subcommand("nf", "Normal form of a word literal");
    std::string nf_word;
    nf->add_option("word", nf_word, "e.g. \"v1 u1\" or \"u1^2 v1^-1 u2\"")->required();

    // trace
    auto* tr = app.add_subcommand("trace", "Exact trace of a vector literal or --expr");
    std::string tr_vec, tr_expr;
    bool tr_numeric = false;
    tr->add_option("vector", tr_vec, "vector literal, e.g. \"1 * <identity> + 2 * u1\"");
    tr->add_option("--expr", tr_expr, "chi-product expression, e.g. \"chi1*chi1\"");
    tr->add_flag("--numeric", tr_numeric, "Also print the value at --theta");

    // inner
    auto* in = app.add_subcommand("inner", "Exact inner product of two vector literals");
    std::string in_x, in_y;
    bool in_numeric = false;
    in->add_option("x", in_x)->required();
    in->add_option("y", in_y)->required();
    in->add_flag("--numeric", in_numeric, "Also print the value at --theta");

    // verify
    auto* vf = app.add_subcommand("verify", "Run the lemma verification suite");
    std::vector<std::string> lemmas;
    std::string out_path, format = "json";
    vf->add_option("--lemma", lemmas, "Restrict to the given lemma ids (repeatable)");
    vf->add_option("--out", out_path, "Write the report to this path (default: stdout)");
    vf->add_option("--format", format, "json or markdown")
        ->check(CLI::IsMember({"json", "markdown"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (*nf) {
            std::cout << scaled_word_str(parse_word_literal(nf_word)) << "\n";
            return kExitOk;
        }
        BasisCatalog catalog(unsafe_truncation ? 1000 : truncation_cap);
        if (*tr) {
            if (tr_vec.empty() == tr_expr.empty())
                throw DomainError("trace: provide exactly one of <vector> or --expr");
            const Vector v =
                tr_expr.empty() ? parse_vector_literal(tr_vec) : parse_expr(catalog, tr_expr);
            print_scalar(trace(v), tr_numeric ? std::optional<double>(theta) : std::nullopt);
            return kExitOk;
        }
        if (*in) {
            const Vector x = parse_vector_literal(in_x);
            const Vector y = parse_vector_literal(in_y);
            print_scalar(inner(x, y), in_numeric ? std::optional<double>(theta) : std::nullopt);
            return kExitOk;
        }
        if (*vf) {
            Config cfg;
            cfg.theta = theta;
            cfg.truncation = truncation;
            cfg.truncation_cap = unsafe_truncation ? 1000 : truncation_cap;
            cfg.seed = seed;
            cfg.tolerance = tolerance;
            cfg.lemma_filter = lemmas;
            if (cfg.truncation > cfg.truncation_cap) {
                std::cerr << "truncation " << cfg.truncation << " exceeds the cap "
                          << cfg.truncation_cap << " (use --unsafe-truncation to override)\n";
                return kExitBadInput;
            }
            Verifier verifier(cfg);
            const Report report = verifier.run_suite();
            const std::string payload =
                format == "json" ? report.to_json().dump(2) + "\n" : report.to_markdown();
            if (out_path.empty()) {
                std::cout << payload;
            } else {
                std::ofstream out(out_path);
                if (!out) {
                    std::cerr << "cannot open " << out_path << "\n";
                    return kExitBadInput;
                }
                out << payload;
            }
            return report.all_exact_pass() ? kExitOk : kExitCheckFailed;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
