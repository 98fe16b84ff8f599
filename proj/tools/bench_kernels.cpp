// Times the OpenMP kernels against their serial reference paths on
// representative workloads: vector convolution, pairwise Gram assembly, and
// fraction-free elimination.

#include <chrono>
#include <iostream>

#include "freetorus/basis.hpp"
#include "freetorus/verifier.hpp"

using namespace freetorus;
namespace chrono = std::chrono;

namespace {

template <typename F>
double time_ms(F&& f) {
    const auto t0 = chrono::steady_clock::now();
    f();
    return chrono::duration<double, std::milli>(chrono::steady_clock::now() - t0).count();
}

void row(const std::string& name, double serial_ms, double parallel_ms) {
    std::cout << name << ": serial " << serial_ms << " ms, parallel " << parallel_ms
              << " ms, speedup " << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << "x\n";
}

}  // namespace

int main() {
    std::cout << "threads: " << max_threads() << (parallel_enabled() ? "" : " (OpenMP disabled)")
              << "\n";
    BasisCatalog cat(7);

    // mul_vec: chi_5 * chi_5 (972 x 972 word products).
    {
        const Vector& c5 = cat.chi(5);
        Vector r1, r2;
        const double s = time_ms([&] { r1 = mul_vec(c5, c5, Exec::Serial); });
        const double p = time_ms([&] { r2 = mul_vec(c5, c5, Exec::Parallel); });
        if (r1 != r2) {
            std::cerr << "mul_vec: serial and parallel results differ\n";
            return 1;
        }
        row("mul_vec chi5*chi5", s, p);
    }

    // Gram assembly on the Lemma 15 box.
    {
        std::vector<Vector> fam;
        for (int i = 1; i <= 2; ++i)
            for (long l : {1L, -1L, 2L, -2L})
                for (long k = -1; k <= 1; ++k)
                    for (long r = 0; r <= 2; ++r)
                        for (long s = 0; s <= 2; ++s) fam.push_back(cat.xi_ilk(i, l, k, r, s));
        Matrix g1, g2;
        const double s = time_ms([&] { g1 = gram_matrix(fam, Exec::Serial); });
        const double p = time_ms([&] { g2 = gram_matrix(fam, Exec::Parallel); });
        if (!(g1 == g2)) {
            std::cerr << "gram_matrix: serial and parallel results differ\n";
            return 1;
        }
        row("gram_matrix (lemma-15 box, " + std::to_string(fam.size()) + " vectors)", s, p);
    }

    // Fraction-free elimination on an S_l pairing kernel.
    {
        const auto gens = cat.s_l_generators(4);
        const auto& words = words_of_length(4);
        Matrix m(gens.size(), words.size());
        for (std::size_t i = 0; i < gens.size(); ++i) {
            std::size_t j = 0;
            for (const Word& w : words) m.at(i, j++) = gens[i].coeff(w).conj();
        }
        std::size_t r1 = 0, r2 = 0;
        const double s = time_ms([&] { r1 = rank(m, PivotStrategy::LeastTerms, Exec::Serial); });
        const double p = time_ms([&] { r2 = rank(m, PivotStrategy::LeastTerms, Exec::Parallel); });
        if (r1 != r2) {
            std::cerr << "rank: serial and parallel results differ\n";
            return 1;
        }
        row("bareiss rank (" + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")",
            s, p);
    }
    return 0;
}
